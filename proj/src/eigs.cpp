// SPDX-License-Identifier: Apache-2.0
#include "cmfma/eigs.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cmfma {

namespace {

/// Swap the diagonal entries i, i+1 of an upper-triangular T by a unitary
/// similarity, accumulating the transform into Q.
void swap_adjacent(CMat& t, CMat& q, int i) {
  const cplx a = t(i, i), h = t(i, i + 1), c = t(i + 1, i + 1);
  // Eigenvector of [[a, h], [0, c]] for eigenvalue c is [h, c - a].
  cplx v1 = h, v2 = c - a;
  const double nrm = std::sqrt(std::norm(v1) + std::norm(v2));
  if (nrm == 0.0) return;  // equal eigenvalues, nothing to move
  v1 /= nrm;
  v2 /= nrm;
  CMat g(2, 2);
  g << v1, -std::conj(v2), v2, std::conj(v1);
  t.middleCols(i, 2) = t.middleCols(i, 2) * g;
  t.middleRows(i, 2) = g.adjoint() * t.middleRows(i, 2);
  q.middleCols(i, 2) = q.middleCols(i, 2) * g;
  t(i + 1, i) = 0.0;
}

/// Reorder the Schur form so diagonal magnitudes are descending.
void sort_schur(CMat& t, CMat& q) {
  const int m = static_cast<int>(t.rows());
  for (int target = 0; target < m - 1; ++target) {
    int best = target;
    for (int j = target + 1; j < m; ++j)
      if (std::abs(t(j, j)) > std::abs(t(best, best))) best = j;
    for (int j = best; j > target; --j) swap_adjacent(t, q, j - 1);
  }
}

/// Eigenvector of an upper-triangular T for its i-th diagonal entry, by
/// back-substitution with a small-pivot guard for clustered eigenvalues.
CVec triangular_eigenvector(const CMat& t, int i) {
  const int m = static_cast<int>(t.rows());
  CVec y = CVec::Zero(m);
  y[i] = 1.0;
  const double guard = 1e-300 + t.norm() * 1e-15;
  for (int j = i - 1; j >= 0; --j) {
    cplx s(0.0, 0.0);
    for (int l = j + 1; l <= i; ++l) s += t(j, l) * y[l];
    cplx d = t(j, j) - t(i, i);
    if (std::abs(d) < guard) d = guard;
    y[j] = -s / d;
  }
  y /= y.norm();
  return y;
}

}  // namespace

EigsResult eigs_largest(const MatVec& op, int n, const EigsOptions& opts) {
  const int nev = opts.nev;
  const int m = std::min(opts.ncv, n);
  if (nev < 1 || nev >= m) throw std::invalid_argument("eigs_largest: need 1 <= nev < ncv <= n");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  CMat v(n, m + 1);
  CMat h = CMat::Zero(m + 1, m);
  {
    CVec v0(n);
    for (int i = 0; i < n; ++i) v0[i] = cplx(dist(rng), dist(rng));
    v.col(0) = v0 / v0.norm();
  }

  EigsResult res;
  int k = 0;  // retained (locked + restart) columns; relation A V_k = V_{k+1} H(0:k+1, 0:k)

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++res.outer_iterations;

    // Expand the decomposition from k to m columns.
    for (int j = k; j < m; ++j) {
      CVec w = op(v.col(j));
      ++res.matvecs;
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const cplx hij = v.col(i).dot(w);
          h(i, j) += hij;
          w -= hij * v.col(i);
        }
      double wn = w.norm();
      if (wn < 1e-14 * h.norm()) {
        // Invariant subspace hit: continue with a fresh orthogonal direction.
        CVec f(n);
        for (int i = 0; i < n; ++i) f[i] = cplx(dist(rng), dist(rng));
        for (int i = 0; i <= j; ++i) f -= v.col(i).dot(f) * v.col(i);
        w = f;
        wn = w.norm();
        h(j + 1, j) = 0.0;
      } else {
        h(j + 1, j) = wn;
      }
      v.col(j + 1) = w / wn;
    }

    // Schur form of the m x m block, wanted values first.
    Eigen::ComplexSchur<CMat> schur(h.topLeftCorner(m, m));
    if (schur.info() != Eigen::Success) throw std::runtime_error("eigs_largest: Schur failure");
    CMat t = schur.matrixT();
    CMat q = schur.matrixU();
    sort_schur(t, q);

    // Residuals of the leading Ritz values: |beta * q(m-1, i)|.
    const double beta = std::abs(h(m, m - 1));
    int nconv = 0;
    while (nconv < nev) {
      const double theta = std::abs(t(nconv, nconv));
      const double r = beta * std::abs(q(m - 1, nconv));
      if (theta == 0.0 || r > opts.tol * theta) break;
      ++nconv;
    }

    const bool last = (outer == opts.max_outer - 1);
    if (nconv >= nev || last) {
      res.values = CVec(nev);
      res.vectors = CMat(n, nev);
      res.residuals = RVec(nev);
      CMat vm = v.leftCols(m) * q;
      for (int i = 0; i < nev; ++i) {
        res.values[i] = t(i, i);
        const CVec y = triangular_eigenvector(t, i);
        CVec x = vm.leftCols(i + 1) * y.head(i + 1);
        x /= x.norm();
        res.vectors.col(i) = x;
        res.residuals[i] =
            beta * std::abs(q.row(m - 1).head(i + 1).dot(y.head(i + 1).conjugate())) /
            std::max(std::abs(t(i, i)), 1e-300);
      }
      res.converged = nconv >= nev;
      return res;
    }

    // Thick restart: keep the leading k columns of the Schur basis.
    k = nev + (m - nev) / 2;
    CMat vk = v.leftCols(m) * q.leftCols(k);
    v.leftCols(k) = vk;
    v.col(k) = v.col(m);
    const Eigen::RowVectorXcd b = h(m, m - 1) * q.row(m - 1).leftCols(k);
    h.setZero();
    h.topLeftCorner(k, k) = t.topLeftCorner(k, k);
    h.row(k).head(k) = b;
  }
  return res;  // unreachable
}

}  // namespace cmfma
