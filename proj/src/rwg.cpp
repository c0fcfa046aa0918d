// SPDX-License-Identifier: Apache-2.0
#include "cmfma/rwg.hpp"

#include <map>
#include <stdexcept>

namespace cmfma {

RwgBasis::RwgBasis(const SurfaceMesh& mesh) : mesh_(&mesh) {
  struct EdgeUse {
    int tri;
    int free_vertex;
    bool forward;  // traverses v1->v2 (ascending vertex index)
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> uses;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3], c = tri[(e + 2) % 3];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      uses[key].push_back({t, c, a < b});
    }
  }
  for (const auto& [key, u] : uses) {
    if (u.size() > 2)
      throw MeshError("non-manifold edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ")");
    if (u.size() != 2) continue;  // boundary edge carries no basis
    RwgEdge e;
    e.v1 = key.first;
    e.v2 = key.second;
    const EdgeUse& plus = u[0].forward ? u[0] : u[1];
    const EdgeUse& minus = u[0].forward ? u[1] : u[0];
    if (plus.forward == minus.forward)
      throw MeshError("inconsistent orientation at edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ")");
    e.tri_plus = plus.tri;
    e.tri_minus = minus.tri;
    e.free_plus = plus.free_vertex;
    e.free_minus = minus.free_vertex;
    e.length = (mesh.vertices()[e.v1] - mesh.vertices()[e.v2]).norm();
    edges_.push_back(e);
  }
  tri_bases_.resize(mesh.num_triangles());
  for (int n = 0; n < size(); ++n) {
    tri_bases_[edges_[n].tri_plus].push_back(n);
    tri_bases_[edges_[n].tri_minus].push_back(n);
  }
}

Vec3 RwgBasis::centroid(int n) const {
  const RwgEdge& e = edges_[n];
  return 0.5 * (mesh_->vertices()[e.v1] + mesh_->vertices()[e.v2]);
}

Vec3 RwgBasis::evaluate(int n, int t, const Vec3& r, double* div) const {
  const RwgEdge& e = edges_[n];
  if (t == e.tri_plus) {
    const double a = mesh_->triangle_area(t);
    if (div) *div = e.length / a;
    return (e.length / (2.0 * a)) * (r - mesh_->vertices()[e.free_plus]);
  }
  if (t == e.tri_minus) {
    const double a = mesh_->triangle_area(t);
    if (div) *div = -e.length / a;
    return (e.length / (2.0 * a)) * (mesh_->vertices()[e.free_minus] - r);
  }
  throw std::invalid_argument("RwgBasis::evaluate: basis does not live on triangle");
}

}  // namespace cmfma
