// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cmfma/rwg.hpp"

namespace cmfma {

enum class ListMode { Standard, AllTranslate };

/// Multilevel spatial grouping of RWG basis centroids with per-level
/// near/far interaction lists. Boxes are half-open [low, high) per axis,
/// so membership is deterministic.
class Octree {
 public:
  struct Box {
    std::array<int, 3> coords{};         // integer grid coords at this level
    int parent = -1;                     // index into level l-1 boxes
    std::vector<int> children;           // indices into level l+1 boxes
    std::vector<int> members;            // basis indices (finest level only)
    std::vector<int> near;               // same-level adjacent boxes, includes self
    std::vector<int> far;                // standard interaction list (same level)
    std::vector<int> siblings;           // same-parent boxes, excluding self
  };

  struct Level {
    double box_size = 0.0;
    std::vector<Box> boxes;
  };

  /// target_box is the requested finest box size as a fraction of lambda,
  /// clamped to the [0.2, 0.5] validity band.
  Octree(const RwgBasis& basis, double k, double target_box = 0.25);

  int finest_level() const { return finest_; }
  int num_levels() const { return finest_ + 1; }  // includes level 0
  bool dense_fallback() const { return dense_fallback_; }
  double wavelength() const { return lambda_; }

  const Level& level(int l) const { return levels_[l]; }
  Vec3 box_center(int l, int b) const;
  double box_size(int l) const { return levels_[l].box_size; }

  /// Finest-level box index holding basis n.
  int box_of(int n) const { return box_of_[n]; }

  /// Translated (observer, source) box pairs at level l.
  /// Standard: classic one-buffer interaction lists, empty below level 2.
  /// AllTranslate: every distinct same-parent pair, levels 1..finest; each
  /// basis pair is covered exactly once at the level where the ancestor
  /// boxes first differ, so only self-box pairs remain untranslated.
  std::vector<std::pair<int, int>> translation_pairs(int l, ListMode mode) const;

  /// Near basis pairs (i, j) induced by the finest-level near lists
  /// (B_m membership). Symmetric, includes diagonal.
  std::vector<std::pair<int, int>> near_basis_pairs() const;

  /// Finest-level adjacent non-self box pairs (B_m minus self). Used by the
  /// standard-bookkeeping variant of the sin-kernel matvec.
  std::vector<std::pair<int, int>> adjacent_pairs_finest() const;

  std::string stats_json() const;

 private:
  double lambda_ = 0.0;
  Vec3 origin_;                 // low corner of the root cube
  double root_size_ = 0.0;
  int finest_ = 0;
  bool dense_fallback_ = false;
  std::vector<Level> levels_;   // levels_[l] for l = 0..finest_
  std::vector<int> box_of_;
};

}  // namespace cmfma
