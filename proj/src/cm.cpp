// SPDX-License-Identifier: Apache-2.0
#include "cmfma/cm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cmfma {

CVec SpectralOperator::apply(const CVec& u) const {
  const CVec b = apply_r(u);
  SolveReport rep;
  CVec x = use_bicgstab ? bicgstab(apply_m, b, inner, precond ? &precond : nullptr, &rep)
                        : gmres(apply_m, b, inner, precond ? &precond : nullptr, &rep);
  inner_iterations += rep.iterations;
  if (!rep.converged) ++inner_failures;
  return x;
}

std::pair<double, double> extract_lambda(cplx mu, SpectralMode mode) {
  if (mu == cplx(0.0, 0.0)) throw std::invalid_argument("extract_lambda: zero Ritz value");
  const cplx inv = 1.0 / mu;
  if (mode == SpectralMode::Sep1) return {inv.imag(), std::abs(inv.real() - 1.0)};
  return {inv.real(), std::abs(inv.imag())};
}

CVec normalize_mode(const CVec& j, const MatVec& apply_r, bool* ok) {
  CVec v = j;
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const cplx top = v[imax];
  if (std::abs(top) > 0.0) v *= std::abs(top) / top;

  const cplx rnorm = (v.transpose() * apply_r(v))(0, 0);  // bilinear form
  if (std::abs(rnorm) < 1e-12 * v.squaredNorm()) {
    if (ok) *ok = false;
    return v / v.norm();
  }
  if (ok) *ok = true;
  // Positive real scaling keeps the phase pin and sets |J^T R J| = 1. With
  // the e^{+ikR} assembly Re(Z) is negative definite on mode currents, so
  // the bilinear form lands at -1: unit radiated power in the classical
  // convention.
  return v / std::sqrt(std::abs(rnorm));
}

namespace {

void sort_by_lambda(CmSolution& sol) {
  std::stable_sort(sol.modes.begin(), sol.modes.end(), [](const CmMode& a, const CmMode& b) {
    return std::abs(a.lambda) < std::abs(b.lambda);
  });
}

}  // namespace

namespace {

/// Rayleigh-Ritz refinement in the span of the extracted vectors using
/// accurate R and X matvecs. The dominant error of the outer solve is
/// mixing among the computed modes (inner-solve noise over small eigen-
/// gaps); solving the projected pencil in that span removes it at the
/// cost of 2 nev matvecs and no inner solves.
void refine_in_span(const SpectralOperator& op, CmSolution& sol) {
  const int m = static_cast<int>(sol.modes.size());
  if (m < 2) return;
  const int n = static_cast<int>(sol.modes[0].current.size());
  CMat v(n, m), rv(m, m), xv(m, m);
  for (int i = 0; i < m; ++i) v.col(i) = sol.modes[i].current;
  for (int j = 0; j < m; ++j) {
    const CVec ru = op.apply_r(v.col(j));
    // Classical reactance: Z = R - iX with the e^{+ikR} kernel, so
    // X u = i (Z u - R u); in Sep mode apply_m is X itself.
    const CVec xu = op.mode == SpectralMode::Sep1 ? CVec(cplx(0, 1) * (op.apply_m(v.col(j)) - ru))
                                                  : CVec(op.apply_m(v.col(j)));
    rv.col(j) = v.transpose() * ru;
    xv.col(j) = v.transpose() * xu;
  }
  const Eigen::PartialPivLU<CMat> lu(rv);
  if (std::abs(lu.determinant()) < 1e-12 * std::pow(rv.norm(), m)) return;
  Eigen::ComplexEigenSolver<CMat> ces(lu.solve(xv));
  if (ces.info() != Eigen::Success) return;
  for (int i = 0; i < m; ++i) {
    CmMode& md = sol.modes[i];
    const cplx lam = ces.eigenvalues()[i];
    // mu chosen so extract_lambda returns Re(lam) with |Im(lam)| as the
    // realness diagnostic in either spectral mode.
    md.mu = op.mode == SpectralMode::Sep1 ? 1.0 / (1.0 + cplx(0, 1) * lam) : 1.0 / lam;
    std::tie(md.lambda, md.realness) = extract_lambda(md.mu, op.mode);
    md.current = normalize_mode(v * ces.eigenvectors().col(i), op.apply_r, &md.normalized);
  }
}

}  // namespace

CmSolution solve_cm(const SpectralOperator& op, int n, double freq_hz, const EigsOptions& opts) {
  op.inner_iterations = 0;
  op.inner_failures = 0;
  const EigsResult r = eigs_largest([&](const CVec& u) { return op.apply(u); }, n, opts);

  CmSolution sol;
  sol.freq_hz = freq_hz;
  sol.nev = opts.nev;
  sol.ncv = opts.ncv;
  sol.outer_iterations = r.outer_iterations;
  sol.inner_iterations = op.inner_iterations;
  for (int i = 0; i < r.values.size(); ++i) {
    CmMode m;
    // The inner solves run against the assembled e^{+ikR}-kernel Z, whose
    // imaginary part is the negative of the classical reactance; the
    // classical transform Z^{-1} R is its elementwise conjugate, so its
    // eigenvalues are the conjugated Ritz values. Sep receives the
    // classical reactance matvec directly.
    m.mu = op.mode == SpectralMode::Sep1 ? std::conj(r.values[i]) : r.values[i];
    std::tie(m.lambda, m.realness) = extract_lambda(m.mu, op.mode);
    m.residual = r.residuals[i];
    m.current = normalize_mode(r.vectors.col(i), op.apply_r, &m.normalized);
    sol.modes.push_back(std::move(m));
  }
  refine_in_span(op, sol);
  sort_by_lambda(sol);
  return sol;
}

CmSolution dense_reference(const CMat& z, int nev, double freq_hz) {
  const int n = static_cast<int>(z.rows());
  if (nev < 1 || nev > n) throw std::invalid_argument("dense_reference: bad nev");
  const RMat r = z.real();
  const RMat x = -z.imag();  // classical reactance; Z is assembled with e^{+ikR}

  Eigen::GeneralizedEigenSolver<RMat> ges;
  ges.compute(x, r, true);
  if (ges.info() != Eigen::Success) throw std::runtime_error("dense_reference: QZ failure");

  struct Cand {
    double lambda;
    double imag;
    int idx;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < n; ++i) {
    const cplx alpha = ges.alphas()[i];
    const double beta = ges.betas()[i];
    if (beta == 0.0 || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) continue;
    const cplx lam = alpha / beta;
    cands.push_back({lam.real(), std::abs(lam.imag()), i});
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return std::abs(a.lambda) < std::abs(b.lambda); });
  if (static_cast<int>(cands.size()) < nev)
    throw std::runtime_error("dense_reference: too few finite eigenvalues");

  MatVec apply_r = [&](const CVec& u) { return CVec(r * u); };
  CmSolution sol;
  sol.freq_hz = freq_hz;
  sol.nev = nev;
  for (int i = 0; i < nev; ++i) {
    CmMode m;
    m.lambda = cands[i].lambda;
    m.mu = 1.0 / cplx(1.0, m.lambda);
    m.realness = cands[i].imag;  // imaginary leakage of the QZ eigenvalue
    m.residual = 0.0;
    m.current = normalize_mode(ges.eigenvectors().col(cands[i].idx), apply_r, &m.normalized);
    sol.modes.push_back(std::move(m));
  }
  sort_by_lambda(sol);
  return sol;
}

TrackResult track_modes(const CmSolution& prev, const CmSolution& next, const MatVec& apply_r) {
  const int np = static_cast<int>(prev.modes.size());
  const int nn = static_cast<int>(next.modes.size());
  RMat corr(np, nn);
  for (int b = 0; b < nn; ++b) {
    const CVec rj = apply_r(next.modes[b].current);
    for (int a = 0; a < np; ++a) corr(a, b) = std::abs((prev.modes[a].current.transpose() * rj)(0, 0));
  }

  TrackResult out;
  out.perm.assign(np, -1);
  out.pair_confidence.assign(np, 0.0);
  out.confidence = 1.0;
  std::vector<bool> used_a(np, false), used_b(nn, false);
  const int nmatch = std::min(np, nn);
  for (int s = 0; s < nmatch; ++s) {
    double best = -1.0;
    int ba = -1, bb = -1;
    for (int a = 0; a < np; ++a) {
      if (used_a[a]) continue;
      for (int b = 0; b < nn; ++b) {
        if (used_b[b]) continue;
        if (corr(a, b) > best) {
          best = corr(a, b);
          ba = a;
          bb = b;
        }
      }
    }
    used_a[ba] = true;
    used_b[bb] = true;
    out.perm[ba] = bb;
    out.pair_confidence[ba] = best;
    out.confidence = std::min(out.confidence, best);
  }
  return out;
}

}  // namespace cmfma
