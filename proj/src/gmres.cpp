// SPDX-License-Identifier: Apache-2.0
#include "cmfma/gmres.hpp"

#include <cmath>
#include <stdexcept>

namespace cmfma {

namespace {

CVec apply_right(const MatVec* precond, const CVec& v) { return precond ? (*precond)(v) : v; }

}  // namespace

CVec gmres(const MatVec& apply_a, const CVec& b, const SolveOptions& opts, const MatVec* precond,
           SolveReport* report) {
  if (opts.tol <= 0.0 || opts.tol >= 1.0) throw std::invalid_argument("gmres: tol out of range");
  const double bnorm = b.norm();
  if (bnorm == 0.0) throw std::invalid_argument("gmres: zero right-hand side");

  const Eigen::Index n = b.size();
  const int m = std::max(1, opts.restart);
  CVec x = CVec::Zero(n);
  SolveReport rep;

  while (rep.iterations < opts.maxit) {
    CVec r = b - apply_a(x);
    double beta = r.norm();
    if (beta / bnorm <= opts.tol) {
      rep.converged = true;
      break;
    }

    CMat v(n, m + 1);
    CMat h = CMat::Zero(m + 1, m);
    std::vector<cplx> cs(m), sn(m);
    CVec g = CVec::Zero(m + 1);
    v.col(0) = r / beta;
    g[0] = beta;

    int j = 0;
    bool inner_done = false;
    for (; j < m && rep.iterations < opts.maxit && !inner_done; ++j) {
      ++rep.iterations;
      CVec w = apply_a(apply_right(precond, v.col(j)));
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const cplx hij = v.col(i).dot(w);
          h(i, j) += hij;
          w -= hij * v.col(i);
        }
      h(j + 1, j) = w.norm();
      if (std::abs(h(j + 1, j)) > 0.0) v.col(j + 1) = w / h(j + 1, j);

      // Givens update of the least-squares problem.
      for (int i = 0; i < j; ++i) {
        const cplx t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -std::conj(sn[i]) * h(i, j) + std::conj(cs[i]) * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::sqrt(std::norm(h(j, j)) + std::norm(h(j + 1, j)));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = std::conj(h(j, j)) / denom;
        sn[j] = std::conj(h(j + 1, j)) / denom;
      }
      h(j, j) = cs[j] * h(j, j) + sn[j] * h(j + 1, j);
      h(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];

      const double est = std::abs(g[j + 1]) / bnorm;
      rep.history.push_back(est);
      if (est <= opts.tol || std::abs(h(j, j)) == 0.0) inner_done = true;
    }

    // Back-substitute and update through the preconditioner.
    CVec y = CVec::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int l = i + 1; l < j; ++l) s -= h(i, l) * y[l];
      y[i] = s / h(i, i);
    }
    x += apply_right(precond, v.leftCols(j) * y);
  }

  rep.residual = (b - apply_a(x)).norm() / bnorm;
  rep.converged = rep.residual <= opts.tol;
  if (report) *report = rep;
  return x;
}

CVec bicgstab(const MatVec& apply_a, const CVec& b, const SolveOptions& opts,
              const MatVec* precond, SolveReport* report) {
  if (opts.tol <= 0.0 || opts.tol >= 1.0) throw std::invalid_argument("bicgstab: tol out of range");
  const double bnorm = b.norm();
  if (bnorm == 0.0) throw std::invalid_argument("bicgstab: zero right-hand side");

  const Eigen::Index n = b.size();
  CVec x = CVec::Zero(n);
  CVec r = b;
  const CVec r0 = r;
  cplx rho(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
  CVec p = CVec::Zero(n), vv = CVec::Zero(n);
  SolveReport rep;

  while (rep.iterations < opts.maxit) {
    ++rep.iterations;
    const cplx rho1 = r0.dot(r);
    if (rho1 == cplx(0.0, 0.0)) break;  // breakdown: return best iterate
    if (rep.iterations == 1) {
      p = r;
    } else {
      const cplx beta = (rho1 / rho) * (alpha / omega);
      p = r + beta * (p - omega * vv);
    }
    rho = rho1;
    const CVec ph = apply_right(precond, p);
    vv = apply_a(ph);
    alpha = rho / r0.dot(vv);
    const CVec s = r - alpha * vv;
    if (s.norm() / bnorm <= opts.tol) {
      x += alpha * ph;
      rep.history.push_back(s.norm() / bnorm);
      break;
    }
    const CVec sh = apply_right(precond, s);
    const CVec t = apply_a(sh);
    const double tn = t.squaredNorm();
    if (tn == 0.0) break;
    omega = t.dot(s) / tn;
    x += alpha * ph + omega * sh;
    r = s - omega * t;
    rep.history.push_back(r.norm() / bnorm);
    if (rep.history.back() <= opts.tol) break;
    if (omega == cplx(0.0, 0.0)) break;
  }

  rep.residual = (b - apply_a(x)).norm() / bnorm;
  rep.converged = rep.residual <= opts.tol;
  if (report) *report = rep;
  return x;
}

}  // namespace cmfma
