// SPDX-License-Identifier: Apache-2.0
#include "cmfma/meshgen.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace cmfma {

SurfaceMesh make_plate(double lx, double ly, int nx, int ny) {
  std::vector<Vec3> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(lx * i / nx, ly * j / ny, 0.0);
  auto idx = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = idx(i, j), v10 = idx(i + 1, j), v11 = idx(i + 1, j + 1), v01 = idx(i, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

SurfaceMesh make_unit_square() { return make_plate(1.0, 1.0, 1, 1); }

SurfaceMesh make_tetrahedron(double r) {
  const double s = r / std::sqrt(3.0);
  std::vector<Vec3> verts = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return SurfaceMesh(std::move(verts), std::move(tris));
}

SurfaceMesh make_cube_sphere(double r, int p) {
  struct Face {
    Vec3 normal, axis_u, axis_v;
  };
  const Face faces[6] = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
      {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};

  std::vector<Vec3> verts;
  std::map<std::tuple<long, long, long>, int> weld;
  auto add_vertex = [&](const Vec3& cube_pt) {
    const Vec3 v = r * cube_pt.normalized();
    // Weld duplicated cube-edge vertices via quantized cube coordinates.
    const double q = 1e12;
    auto key = std::make_tuple(std::lround(cube_pt.x() * q), std::lround(cube_pt.y() * q),
                               std::lround(cube_pt.z() * q));
    auto [it, inserted] = weld.insert({key, static_cast<int>(verts.size())});
    if (inserted) verts.push_back(v);
    return it->second;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(12 * p * p);
  for (const Face& f : faces) {
    std::vector<int> grid((p + 1) * (p + 1));
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) {
        const double u = -1.0 + 2.0 * i / p;
        const double v = -1.0 + 2.0 * j / p;
        grid[j * (p + 1) + i] = add_vertex(f.normal + u * f.axis_u + v * f.axis_v);
      }
    auto g = [&](int i, int j) { return grid[j * (p + 1) + i]; };
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < p; ++i) {
        tris.push_back({g(i, j), g(i + 1, j), g(i + 1, j + 1)});
        tris.push_back({g(i, j), g(i + 1, j + 1), g(i, j + 1)});
      }
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

}  // namespace cmfma
