// SPDX-License-Identifier: Apache-2.0
#include "cmfma/sai.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cmfma {

SaiOptions sai_preset_plate() { return {0.01, 0.014, 0.18}; }
SaiOptions sai_preset_uav() { return {0.01, 0.012, 0.07}; }
SaiOptions sai_preset_dreamliner() { return {0.008, 0.01, 0.07}; }

Eigen::SparseMatrix<cplx> build_sai(const NearBlock& near, const SaiOptions& opts) {
  for (double e : {opts.eps1, opts.eps2, opts.eps3})
    if (e <= 0.0 || e >= 1.0) throw std::invalid_argument("build_sai: thresholds must be in (0,1)");
  const int n = static_cast<int>(near.cols());
  if (near.rows() != n) throw std::invalid_argument("build_sai: near block must be square");

  double gmax = 0.0;
  for (int c = 0; c < near.outerSize(); ++c)
    for (NearBlock::InnerIterator it(near, c); it; ++it)
      gmax = std::max(gmax, std::abs(it.value()));
  if (gmax == 0.0) throw std::invalid_argument("build_sai: empty near block");

  // Per-column pattern of P: thresholded, pruned, fill-capped near pattern.
  std::vector<std::vector<int>> pattern(n);
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<double, int>> kept;
    int col_nnz = 0;
    for (NearBlock::InnerIterator it(near, j); it; ++it) {
      ++col_nnz;
      const double a = std::abs(it.value());
      if (a >= opts.eps1 * gmax) kept.push_back({a, static_cast<int>(it.row())});
    }
    double cmax = 0.0;
    for (const auto& [a, i] : kept) cmax = std::max(cmax, a);
    std::erase_if(kept, [&](const auto& e) { return e.first < opts.eps2 * cmax; });
    std::sort(kept.begin(), kept.end(), std::greater<>());
    const size_t cap = std::max<size_t>(1, static_cast<size_t>(std::ceil(opts.eps3 * col_nnz)));
    if (kept.size() > cap) kept.resize(cap);
    auto& pj = pattern[j];
    for (const auto& [a, i] : kept) pj.push_back(i);
    if (std::find(pj.begin(), pj.end(), j) == pj.end()) pj.push_back(j);
    std::sort(pj.begin(), pj.end());
  }

  // Row index lists of the near block, for gathering the local problems.
  std::vector<std::vector<std::pair<int, cplx>>> cols(n);
  for (int c = 0; c < near.outerSize(); ++c)
    for (NearBlock::InnerIterator it(near, c); it; ++it)
      cols[c].push_back({static_cast<int>(it.row()), it.value()});

  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<int> row_pos(n, -1);
  for (int j = 0; j < n; ++j) {
    const auto& pj = pattern[j];
    const int nj = static_cast<int>(pj.size());

    // Rows touched by the pattern columns.
    std::vector<int> rows;
    for (int cidx : pj)
      for (const auto& [r, v] : cols[cidx])
        if (row_pos[r] < 0) {
          row_pos[r] = static_cast<int>(rows.size());
          rows.push_back(r);
        }
    const int ni = static_cast<int>(rows.size());

    CMat a = CMat::Zero(ni, nj);
    for (int cj = 0; cj < nj; ++cj)
      for (const auto& [r, v] : cols[pj[cj]]) a(row_pos[r], cj) = v;
    CVec e = CVec::Zero(ni);
    if (row_pos[j] >= 0) e[row_pos[j]] = 1.0;
    for (int r : rows) row_pos[r] = -1;

    bool ok;
    CVec p;
    if (e.norm() == 0.0 || ni < nj) {
      ok = false;
    } else {
      Eigen::ColPivHouseholderQR<CMat> qr(a);
      p = qr.solve(e);
      ok = p.allFinite() && qr.rank() == nj;
    }
    if (ok) {
      for (int cj = 0; cj < nj; ++cj) trips.emplace_back(pj[cj], j, p[cj]);
    } else {
      // Degenerate local problem: Jacobi fallback for this column.
      cplx zjj(0.0, 0.0);
      for (const auto& [r, v] : cols[j])
        if (r == j) zjj = v;
      trips.emplace_back(j, j, zjj != cplx(0.0, 0.0) ? 1.0 / zjj : cplx(1.0, 0.0));
    }
  }

  Eigen::SparseMatrix<cplx> p(n, n);
  p.setFromTriplets(trips.begin(), trips.end());
  return p;
}

}  // namespace cmfma
