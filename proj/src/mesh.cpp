// SPDX-License-Identifier: Apache-2.0
#include "cmfma/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace cmfma {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  normals_.reserve(triangles_.size());
  areas_.reserve(triangles_.size());
  for (size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= num_vertices())
        throw MeshError("triangle " + std::to_string(t) + " references invalid vertex");
    const Vec3 e1 = vertices_[tri[1]] - vertices_[tri[0]];
    const Vec3 e2 = vertices_[tri[2]] - vertices_[tri[0]];
    const Vec3 cr = e1.cross(e2);
    const double a2 = cr.norm();
    areas_.push_back(0.5 * a2);
    normals_.push_back(a2 > 0.0 ? Vec3(cr / a2) : Vec3(0, 0, 0));
  }
}

Vec3 SurfaceMesh::triangle_center(int t) const {
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

void SurfaceMesh::validate() const {
  if (triangles_.empty()) throw MeshError("mesh has no triangles");

  // Degenerate triangles.
  double max_extent = 0.0;
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  max_extent = (hi - lo).norm();
  const double area_tol = 1e-14 * max_extent * max_extent;
  for (int t = 0; t < num_triangles(); ++t)
    if (areas_[t] <= area_tol)
      throw MeshError("degenerate triangle " + std::to_string(t));

  // Duplicate vertices (tolerance relative to mesh extent).
  const double dup_tol = 1e-12 * std::max(max_extent, 1e-300);
  std::vector<int> order(vertices_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::lexicographical_compare(vertices_[a].data(), vertices_[a].data() + 3,
                                        vertices_[b].data(), vertices_[b].data() + 3);
  });
  for (size_t i = 1; i < order.size(); ++i)
    if ((vertices_[order[i]] - vertices_[order[i - 1]]).norm() < dup_tol)
      throw MeshError("duplicate vertices " + std::to_string(order[i - 1]) + " and " +
                      std::to_string(order[i]));

  // Manifoldness and orientation. A consistently oriented pair traverses
  // the shared edge in opposite directions.
  std::map<std::pair<int, int>, std::vector<std::pair<int, bool>>> edges;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      edges[edge_key(a, b)].push_back({t, a < b});
    }
  }
  for (const auto& [key, tris] : edges) {
    if (tris.size() > 2)
      throw MeshError("non-manifold edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") shared by " +
                      std::to_string(tris.size()) + " triangles");
    if (tris.size() == 2 && tris[0].second == tris[1].second)
      throw MeshError("inconsistent orientation between triangles " +
                      std::to_string(tris[0].first) + " and " + std::to_string(tris[1].first));
  }
}

SurfaceMesh::Stats SurfaceMesh::stats() const {
  Stats s;
  s.num_vertices = num_vertices();
  s.num_triangles = num_triangles();
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : triangles_)
    for (int e = 0; e < 3; ++e)
      edge_count[edge_key(tri[e], tri[(e + 1) % 3])]++;
  s.num_edges = static_cast<int>(edge_count.size());
  double sum = 0.0;
  s.edge_min = 1e300;
  for (const auto& [key, cnt] : edge_count) {
    const double len = (vertices_[key.first] - vertices_[key.second]).norm();
    s.edge_min = std::min(s.edge_min, len);
    s.edge_max = std::max(s.edge_max, len);
    sum += len;
    if (cnt == 2) s.num_interior_edges++;
  }
  s.edge_mean = sum / s.num_edges;
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  s.extent = (hi - lo).norm();
  return s;
}

namespace {

SurfaceMesh load_off(std::istream& in, const std::string& path) {
  std::string tok;
  if (!(in >> tok) || tok != "OFF") throw MeshError(path + ": missing OFF header");
  int nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw MeshError(path + ": bad OFF counts");
  std::vector<Vec3> verts(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> verts[i].x() >> verts[i].y() >> verts[i].z()))
      throw MeshError(path + ": bad vertex " + std::to_string(i));
  std::vector<std::array<int, 3>> tris;
  tris.reserve(nf);
  for (int i = 0; i < nf; ++i) {
    int n = 0;
    if (!(in >> n)) throw MeshError(path + ": bad face " + std::to_string(i));
    if (n != 3) throw MeshError(path + ": face " + std::to_string(i) + " is not a triangle");
    std::array<int, 3> t{};
    if (!(in >> t[0] >> t[1] >> t[2])) throw MeshError(path + ": bad face " + std::to_string(i));
    tris.push_back(t);
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

SurfaceMesh load_msh2(std::istream& in, const std::string& path) {
  std::string line;
  std::vector<Vec3> verts;
  std::map<long, int> node_index;
  std::vector<std::array<int, 3>> tris;
  bool saw_nodes = false, saw_elements = false;
  while (std::getline(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      std::getline(in, line);
      std::istringstream ss(line);
      double version = 0;
      ss >> version;
      if (version < 2.0 || version >= 3.0)
        throw MeshError(path + ": unsupported MSH version " + line);
    } else if (line.rfind("$Nodes", 0) == 0) {
      saw_nodes = true;
      std::getline(in, line);
      const long n = std::stol(line);
      verts.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream ss(line);
        long id;
        Vec3 v;
        if (!(ss >> id >> v.x() >> v.y() >> v.z()))
          throw MeshError(path + ": bad node line: " + line);
        node_index[id] = static_cast<int>(verts.size());
        verts.push_back(v);
      }
    } else if (line.rfind("$Elements", 0) == 0) {
      saw_elements = true;
      std::getline(in, line);
      const long n = std::stol(line);
      for (long i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream ss(line);
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) throw MeshError(path + ": bad element line: " + line);
        long tag;
        for (int t = 0; t < ntags; ++t) ss >> tag;
        if (type != 2) continue;  // keep 3-node triangles only
        long a, b, c;
        if (!(ss >> a >> b >> c)) throw MeshError(path + ": bad triangle element: " + line);
        tris.push_back({node_index.at(a), node_index.at(b), node_index.at(c)});
      }
    }
  }
  if (!saw_nodes || !saw_elements) throw MeshError(path + ": missing $Nodes or $Elements");
  // Drop nodes not referenced by any triangle (gmsh exports line/point nodes too).
  std::vector<int> remap(verts.size(), -1);
  std::vector<Vec3> used;
  for (auto& t : tris)
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(verts[v]);
      }
      v = remap[v];
    }
  return SurfaceMesh(std::move(used), std::move(tris));
}

}  // namespace

SurfaceMesh load_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  if (format == MeshFormat::Auto) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".msh")
      format = MeshFormat::Msh2;
    else
      format = MeshFormat::Off;
  }
  SurfaceMesh mesh = (format == MeshFormat::Off) ? load_off(in, path) : load_msh2(in, path);
  mesh.validate();
  return mesh;
}

void write_mesh_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open for writing: " + path);
  out.precision(17);
  out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_triangles() << " 0\n";
  for (const auto& v : mesh.vertices()) out << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw MeshError("write failed: " + path);
}

}  // namespace cmfma
