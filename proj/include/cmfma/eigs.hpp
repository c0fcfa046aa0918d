// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "cmfma/gmres.hpp"

namespace cmfma {

struct EigsOptions {
  int nev = 5;
  int ncv = 20;
  double tol = 1e-8;    // relative Ritz residual |r| / |theta|
  int max_outer = 300;  // restart cycles
  uint64_t seed = 1;    // start-vector seed
};

struct EigsResult {
  CVec values;     // Ritz values, |value| descending
  CMat vectors;    // n x values.size(), unit columns
  RVec residuals;  // relative Ritz residuals
  int outer_iterations = 0;
  int matvecs = 0;
  bool converged = false;
};

/// Largest-|value| eigenpairs of a general complex operator by the
/// Arnoldi method with thick (Krylov-Schur) restarting: the restart keeps
/// the leading ncv-to-k block of the reordered Schur form, which applies
/// the implicit exact-shift filter of the classic restarted iteration.
EigsResult eigs_largest(const MatVec& op, int n, const EigsOptions& opts = {});

}  // namespace cmfma
