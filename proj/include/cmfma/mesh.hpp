// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmfma/types.hpp"

namespace cmfma {

enum class MeshFormat { Off, Msh2, Auto };

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Triangulated PEC surface. Coordinates are meters. Immutable after
/// construction/validation; safe for concurrent reads.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;
  SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  double triangle_area(int t) const { return areas_[t]; }
  Vec3 triangle_center(int t) const;

  /// Validates areas, duplicate vertices, manifoldness (<=2 triangles per
  /// edge) and consistent orientation across shared edges. Throws MeshError
  /// with offending indices on failure.
  void validate() const;

  struct Stats {
    int num_vertices = 0;
    int num_triangles = 0;
    int num_edges = 0;
    int num_interior_edges = 0;
    double edge_min = 0.0, edge_mean = 0.0, edge_max = 0.0;
    double extent = 0.0;  // bounding-box diagonal, meters
  };
  Stats stats() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

SurfaceMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);
void write_mesh_off(const SurfaceMesh& mesh, const std::string& path);

}  // namespace cmfma
