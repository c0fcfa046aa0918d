// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cmfma/mesh.hpp"

namespace cmfma {

/// One RWG basis function over an interior edge. Current flows from the
/// plus triangle to the minus triangle. The plus triangle is the one that
/// traverses the shared edge from the lower to the higher vertex index.
struct RwgEdge {
  int tri_plus = -1;
  int tri_minus = -1;
  int v1 = -1, v2 = -1;       // shared edge, v1 < v2
  int free_plus = -1;         // vertex of tri_plus opposite the edge
  int free_minus = -1;
  double length = 0.0;        // meters
};

class RwgBasis {
 public:
  RwgBasis(const SurfaceMesh& mesh);

  const SurfaceMesh& mesh() const { return *mesh_; }
  int size() const { return static_cast<int>(edges_.size()); }
  const RwgEdge& edge(int n) const { return edges_[n]; }
  const std::vector<RwgEdge>& edges() const { return edges_; }

  /// Midpoint of the shared edge; used for octree grouping.
  Vec3 centroid(int n) const;

  /// Evaluate basis n at a point on triangle t (t must be one of its two
  /// triangles). Returns the vector value; `div` gets the surface divergence.
  Vec3 evaluate(int n, int t, const Vec3& r, double* div = nullptr) const;

  /// The triangles a basis lives on, and the bases living on a triangle.
  const std::vector<std::vector<int>>& bases_on_triangle() const { return tri_bases_; }

 private:
  const SurfaceMesh* mesh_;
  std::vector<RwgEdge> edges_;
  std::vector<std::vector<int>> tri_bases_;
};

}  // namespace cmfma
