// SPDX-License-Identifier: Apache-2.0
#include "cmfma/octree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cmfma {

namespace {

uint64_t pack(const std::array<int, 3>& c) {
  return (uint64_t(uint32_t(c[0])) << 42) | (uint64_t(uint32_t(c[1]) & 0x1FFFFF) << 21) |
         (uint64_t(uint32_t(c[2]) & 0x1FFFFF));
}

}  // namespace

Octree::Octree(const RwgBasis& basis, double k, double target_box) {
  if (k <= 0.0) throw std::invalid_argument("Octree: k must be positive");
  target_box = std::clamp(target_box, 0.2, 0.5);
  lambda_ = 2.0 * kPi / k;

  const int n = basis.size();
  std::vector<Vec3> pts(n);
  Vec3 lo = basis.centroid(0), hi = lo;
  for (int i = 0; i < n; ++i) {
    pts[i] = basis.centroid(i);
    lo = lo.cwiseMin(pts[i]);
    hi = hi.cwiseMax(pts[i]);
  }
  const double extent = (hi - lo).maxCoeff();
  if (extent <= 0.0) throw std::invalid_argument("Octree: degenerate extent");
  root_size_ = extent * (1.0 + 1e-9);
  origin_ = 0.5 * (lo + hi) - 0.5 * root_size_ * Vec3::Ones();

  // Finest level: deepest box size within [0.2, 0.5] lambda, nearest the target.
  const int lmax = static_cast<int>(std::floor(std::log2(root_size_ / (0.2 * lambda_))));
  const int lmin = std::max(1, static_cast<int>(std::ceil(std::log2(root_size_ / (0.5 * lambda_)))));
  if (lmax < 1) {
    // Object no larger than a couple of finest boxes: no usable far field.
    dense_fallback_ = true;
    finest_ = 0;
  } else {
    const double ideal = std::log2(root_size_ / (target_box * lambda_));
    finest_ = std::clamp(static_cast<int>(std::lround(ideal)), lmin, lmax);
  }

  levels_.resize(finest_ + 1);
  for (int l = 0; l <= finest_; ++l) levels_[l].box_size = root_size_ / double(1 << l);

  // Occupied finest boxes.
  const double af = levels_[finest_].box_size;
  const int ncells = 1 << finest_;
  std::map<uint64_t, int> index;
  box_of_.resize(n);
  for (int i = 0; i < n; ++i) {
    std::array<int, 3> c;
    for (int d = 0; d < 3; ++d)
      c[d] = std::clamp(static_cast<int>(std::floor((pts[i][d] - origin_[d]) / af)), 0, ncells - 1);
    auto [it, inserted] = index.insert({pack(c), static_cast<int>(levels_[finest_].boxes.size())});
    if (inserted) {
      Box b;
      b.coords = c;
      levels_[finest_].boxes.push_back(std::move(b));
    }
    levels_[finest_].boxes[it->second].members.push_back(i);
    box_of_[i] = it->second;
  }
  if (levels_[finest_].boxes.size() <= 1) dense_fallback_ = true;

  // Ancestors, coarsest first linkage done fine-to-coarse.
  for (int l = finest_; l >= 1; --l) {
    std::map<uint64_t, int> pindex;
    for (size_t bi = 0; bi < levels_[l].boxes.size(); ++bi) {
      Box& b = levels_[l].boxes[bi];
      std::array<int, 3> pc = {b.coords[0] >> 1, b.coords[1] >> 1, b.coords[2] >> 1};
      auto [it, inserted] =
          pindex.insert({pack(pc), static_cast<int>(levels_[l - 1].boxes.size())});
      if (inserted) {
        Box pb;
        pb.coords = pc;
        levels_[l - 1].boxes.push_back(std::move(pb));
      }
      b.parent = it->second;
      levels_[l - 1].boxes[it->second].children.push_back(static_cast<int>(bi));
    }
  }

  // Near, sibling, and standard interaction lists per level.
  for (int l = 0; l <= finest_; ++l) {
    std::map<uint64_t, int> idx;
    auto& boxes = levels_[l].boxes;
    for (size_t bi = 0; bi < boxes.size(); ++bi) idx[pack(boxes[bi].coords)] = static_cast<int>(bi);
    for (size_t bi = 0; bi < boxes.size(); ++bi) {
      Box& b = boxes[bi];
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            std::array<int, 3> c = {b.coords[0] + dx, b.coords[1] + dy, b.coords[2] + dz};
            if (c[0] < 0 || c[1] < 0 || c[2] < 0) continue;
            auto it = idx.find(pack(c));
            if (it != idx.end()) b.near.push_back(it->second);
          }
      std::sort(b.near.begin(), b.near.end());
      if (l >= 1) {
        for (size_t bj = 0; bj < boxes.size(); ++bj)
          if (bj != bi && boxes[bj].parent == b.parent) b.siblings.push_back(static_cast<int>(bj));
      }
      if (l >= 2) {
        // Children of the parent's near boxes, excluding own near set.
        const Box& parent = levels_[l - 1].boxes[b.parent];
        for (int pn : parent.near)
          for (int ch : levels_[l - 1].boxes[pn].children)
            if (!std::binary_search(b.near.begin(), b.near.end(), ch)) b.far.push_back(ch);
        std::sort(b.far.begin(), b.far.end());
      }
    }
  }
}

Vec3 Octree::box_center(int l, int b) const {
  const double a = levels_[l].box_size;
  const auto& c = levels_[l].boxes[b].coords;
  return origin_ + a * Vec3(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

std::vector<std::pair<int, int>> Octree::translation_pairs(int l, ListMode mode) const {
  std::vector<std::pair<int, int>> out;
  const auto& boxes = levels_[l].boxes;
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    const auto& src = (mode == ListMode::Standard) ? boxes[bi].far : boxes[bi].siblings;
    for (int bj : src) out.push_back({static_cast<int>(bi), bj});
  }
  return out;
}

std::vector<std::pair<int, int>> Octree::near_basis_pairs() const {
  std::vector<std::pair<int, int>> out;
  const auto& boxes = levels_[finest_].boxes;
  for (const Box& b : boxes)
    for (int nb : b.near)
      for (int i : b.members)
        for (int j : boxes[nb].members) out.push_back({i, j});
  return out;
}

std::vector<std::pair<int, int>> Octree::adjacent_pairs_finest() const {
  std::vector<std::pair<int, int>> out;
  const auto& boxes = levels_[finest_].boxes;
  for (size_t bi = 0; bi < boxes.size(); ++bi)
    for (int nb : boxes[bi].near)
      if (nb != static_cast<int>(bi)) out.push_back({static_cast<int>(bi), nb});
  return out;
}

std::string Octree::stats_json() const {
  std::ostringstream os;
  os << "{\"levels\":" << num_levels() << ",\"dense_fallback\":" << (dense_fallback_ ? "true" : "false")
     << ",\"lambda\":" << lambda_ << ",\"per_level\":[";
  for (int l = 0; l <= finest_; ++l) {
    size_t nnear = 0, nfar = 0, nsib = 0;
    for (const Box& b : levels_[l].boxes) {
      nnear += b.near.size();
      nfar += b.far.size();
      nsib += b.siblings.size();
    }
    os << (l ? "," : "") << "{\"level\":" << l << ",\"box_size\":" << levels_[l].box_size
       << ",\"boxes\":" << levels_[l].boxes.size() << ",\"near_pairs\":" << nnear
       << ",\"far_pairs\":" << nfar << ",\"sibling_pairs\":" << nsib << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace cmfma
