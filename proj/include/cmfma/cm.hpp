// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cmfma/eigs.hpp"

namespace cmfma {

/// Spectral transformation driving the outer eigensolver. Sep1 applies
/// Z^{-1} R with mu = 1/(1 + i lambda) (the default); Sep applies
/// X^{-1} R with mu = 1/lambda. Both map the smallest-|lambda| modes to
/// the largest-|mu| Ritz values. Lambda follows the classical convention
/// (lambda < 0 stores electric energy), whose reactance is the negative
/// of the e^{+ikR}-kernel Im(Z): Sep1's apply_m takes the assembled Z
/// matvec and the Ritz values are conjugated on extraction; Sep's
/// apply_m must be the classical reactance matvec, -Im(Z) u.
enum class SpectralMode { Sep1, Sep };

struct SpectralOperator {
  MatVec apply_r;           // R matvec
  MatVec apply_m;           // Z (Sep1) or X (Sep) matvec
  SpectralMode mode = SpectralMode::Sep1;
  SolveOptions inner{};     // inner solver settings
  MatVec precond;           // optional right preconditioner for the inner solve
  bool use_bicgstab = false;

  // Accumulated telemetry across apply() calls.
  mutable long inner_iterations = 0;
  mutable int inner_failures = 0;

  /// One R matvec followed by one inner solve to the configured tolerance.
  CVec apply(const CVec& u) const;
};

/// lambda and its realness diagnostic from a Ritz value. Sep1: lambda =
/// Im(1/mu), diagnostic |Re(1/mu) - 1|; Sep: lambda = Re(1/mu),
/// diagnostic |Im(1/mu)|.
std::pair<double, double> extract_lambda(cplx mu, SpectralMode mode);

struct CmMode {
  double lambda = 0.0;
  cplx mu;
  double realness = 0.0;
  double residual = 0.0;
  CVec current;            // J with |J^T R J| = 1, largest entry real positive
  bool normalized = true;  // false when the R-norm was degenerate
};

struct CmSolution {
  double freq_hz = 0.0;
  std::vector<CmMode> modes;  // |lambda| ascending
  int nev = 0, ncv = 0;
  int outer_iterations = 0;
  long inner_iterations = 0;
};

/// Phase-fix J so the largest-magnitude entry is real positive, then scale
/// by a positive real so |J^T R J| = 1 (bilinear, not Hermitian). For real
/// mode currents with the e^{+ikR}-assembled R the form equals -1, i.e.
/// J^T (-R) J = 1: unit classical radiated power. Degenerate R-norms leave
/// J unit-norm and set *ok to false.
CVec normalize_mode(const CVec& j, const MatVec& apply_r, bool* ok = nullptr);

/// Outer eigensolve through the spectral operator, converted to modes.
CmSolution solve_cm(const SpectralOperator& op, int n, double freq_hz,
                    const EigsOptions& opts = {});

/// Dense QZ reference on the real pencil (X, R) from the full Z matrix.
CmSolution dense_reference(const CMat& z, int nev, double freq_hz);

struct TrackResult {
  std::vector<int> perm;  // perm[m] = index in `next` matched to prev mode m
  std::vector<double> pair_confidence;  // |J_prev^T R J_next| per prev mode
  double confidence = 0.0;  // minimum matched |J_prev^T R J_next|
};

/// Greedy correlation matching of modes across two nearby frequencies.
TrackResult track_modes(const CmSolution& prev, const CmSolution& next, const MatVec& apply_r);

}  // namespace cmfma
