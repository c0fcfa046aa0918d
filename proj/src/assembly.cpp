// SPDX-License-Identifier: Apache-2.0
#include "cmfma/assembly.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cmfma/quadrature.hpp"

namespace cmfma {

StaticPotentials static_potentials(const Vec3& v1, const Vec3& v2, const Vec3& v3, const Vec3& r) {
  const Vec3 nhat = (v2 - v1).cross(v3 - v1).normalized();
  const double w0 = (r - v1).dot(nhat);
  const Vec3 rho = r - w0 * nhat;

  double i0 = 0.0;
  Vec3 ivec = Vec3::Zero();
  const Vec3 verts[4] = {v1, v2, v3, v1};
  const double scale = std::max({(v2 - v1).norm(), (v3 - v2).norm(), (v1 - v3).norm()});
  const double eps = 1e-13 * scale;

  for (int e = 0; e < 3; ++e) {
    const Vec3& a = verts[e];
    const Vec3& b = verts[e + 1];
    const Vec3 shat = (b - a).normalized();
    const Vec3 mhat = shat.cross(nhat);  // outward in-plane edge normal
    const double t0 = (a - rho).dot(mhat);
    const double sm = (a - rho).dot(shat);
    const double sp = (b - rho).dot(shat);
    const double rm = (a - r).norm();
    const double rp = (b - r).norm();
    const double r0sq = t0 * t0 + w0 * w0;

    double f2;
    if (sp + sm > 0.0)
      f2 = std::log((rp + sp) / (rm + sm));
    else
      f2 = std::log((rm - sm) / (rp - sp));
    if (!std::isfinite(f2)) f2 = 0.0;  // observation on the edge segment: t0*f2 -> 0

    double beta = 0.0;
    if (r0sq > eps * eps) {
      const double aw = std::abs(w0);
      beta = std::atan(t0 * sp / (r0sq + aw * rp)) - std::atan(t0 * sm / (r0sq + aw * rm));
    }
    i0 += t0 * f2 - std::abs(w0) * beta;
    ivec += 0.5 * (r0sq * f2 + sp * rp - sm * rm) * mhat;
  }
  return {i0, ivec};
}

namespace {

// (e^{ikR} - 1)/R, stable at small kR.
inline cplx smooth_kernel(double k, double R) {
  const double x = k * R;
  if (x < 1e-4) {
    const cplx z(0.0, x);
    return cplx(0.0, k) * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
  }
  return (std::exp(cplx(0.0, x)) - 1.0) / R;
}

struct HalfRwg {
  int tri;
  Vec3 free_vertex;
  double sign;    // +1 on the plus triangle, -1 on the minus
  double length;
};

struct TriGeom {
  Vec3 v[3];
  double area;
  Vec3 center;
  double diam;
};

TriGeom tri_geom(const SurfaceMesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  TriGeom g;
  for (int i = 0; i < 3; ++i) g.v[i] = mesh.vertices()[tri[i]];
  g.area = mesh.triangle_area(t);
  g.center = (g.v[0] + g.v[1] + g.v[2]) / 3.0;
  g.diam = std::max({(g.v[1] - g.v[0]).norm(), (g.v[2] - g.v[1]).norm(), (g.v[0] - g.v[2]).norm()});
  return g;
}

bool triangles_touch(const SurfaceMesh& mesh, int t1, int t2) {
  const auto& a = mesh.triangles()[t1];
  const auto& b = mesh.triangles()[t2];
  for (int i : a)
    for (int j : b)
      if (i == j) return true;
  return false;
}

// One triangle-pair contribution to Z_ij / (ik*eta):
//   int_test int_src [f_i . f_j - (div f_i)(div f_j)/k^2] g(R)
// Roles are canonicalized by triangle index so that evaluation order is
// deterministic and entry symmetry is exact.
cplx tri_pair_term(const SurfaceMesh& mesh, HalfRwg ti, HalfRwg tj, double k,
                   const AssemblyOptions& opts) {
  if (tj.tri < ti.tri) std::swap(ti, tj);  // kernel is symmetric under role swap

  const TriGeom gt = tri_geom(mesh, ti.tri);
  const TriGeom gs = tri_geom(mesh, tj.tri);
  const double ci = ti.sign * ti.length / (2.0 * gt.area);
  const double cj = tj.sign * tj.length / (2.0 * gs.area);
  const double divi = ti.sign * ti.length / gt.area;
  const double divj = tj.sign * tj.length / gs.area;

  const bool touching = (ti.tri == tj.tri) || triangles_touch(mesh, ti.tri, tj.tri);
  const bool near = touching || (gt.center - gs.center).norm() <
                                    opts.near_factor * (gt.diam + gs.diam);

  cplx acc(0.0, 0.0);
  if (!near) {
    const auto& rule = triangle_rule(opts.far_order);
    for (const auto& qt : rule) {
      const Vec3 r = tri_point(qt, gt.v[0], gt.v[1], gt.v[2]);
      const Vec3 fi = ci * (r - ti.free_vertex);
      cplx vsum(0.0, 0.0);
      Eigen::Vector3cd vvec = Eigen::Vector3cd::Zero();
      for (const auto& qs : rule) {
        const Vec3 rp = tri_point(qs, gs.v[0], gs.v[1], gs.v[2]);
        const double R = (r - rp).norm();
        const cplx g = std::exp(cplx(0.0, k * R)) / R;
        const cplx wg = qs.w * g;
        vvec += wg * (rp - tj.free_vertex);
        vsum += wg;
      }
      acc += qt.w * (cj * fi.cast<cplx>().dot(vvec) - (divi * divj / (k * k)) * vsum);
    }
    return acc * gt.area * gs.area;
  }

  // Near path: outer numeric, inner = smooth numeric + analytic 1/R.
  const auto& rule = triangle_rule(opts.near_order);
  for (const auto& qt : rule) {
    const Vec3 r = tri_point(qt, gt.v[0], gt.v[1], gt.v[2]);
    const Vec3 fi = ci * (r - ti.free_vertex);

    cplx vsum(0.0, 0.0);
    Eigen::Vector3cd vvec = Eigen::Vector3cd::Zero();
    for (const auto& qs : rule) {
      const Vec3 rp = tri_point(qs, gs.v[0], gs.v[1], gs.v[2]);
      const double R = (r - rp).norm();
      const cplx g = smooth_kernel(k, R);
      vvec += (qs.w * g) * (rp - tj.free_vertex);
      vsum += qs.w * g;
    }
    vvec *= gs.area;
    vsum *= gs.area;

    const StaticPotentials sp = static_potentials(gs.v[0], gs.v[1], gs.v[2], r);
    const Vec3 nhat = (gs.v[1] - gs.v[0]).cross(gs.v[2] - gs.v[0]).normalized();
    const Vec3 rho = r - (r - gs.v[0]).dot(nhat) * nhat;
    vvec += (sp.ivec + (rho - tj.free_vertex) * sp.i0).cast<cplx>();
    vsum += sp.i0;

    acc += qt.w * (cj * fi.cast<cplx>().dot(vvec) - (divi * divj / (k * k)) * vsum);
  }
  return acc * gt.area;
}

HalfRwg half(const RwgBasis& basis, int n, bool plus) {
  const RwgEdge& e = basis.edge(n);
  HalfRwg h;
  h.tri = plus ? e.tri_plus : e.tri_minus;
  h.free_vertex = basis.mesh().vertices()[plus ? e.free_plus : e.free_minus];
  h.sign = plus ? 1.0 : -1.0;
  h.length = e.length;
  return h;
}

}  // namespace

cplx galerkin_entry(const RwgBasis& basis, int i, int j, double k, const AssemblyOptions& opts) {
  if (k <= 0.0) throw std::invalid_argument("galerkin_entry: k must be positive");
  if (i > j) std::swap(i, j);  // exact symmetry by construction
  const SurfaceMesh& mesh = basis.mesh();
  cplx sum(0.0, 0.0);
  for (bool pi : {true, false})
    for (bool pj : {true, false})
      sum += tri_pair_term(mesh, half(basis, i, pi), half(basis, j, pj), k, opts);
  return cplx(0.0, k * kFreeSpaceEta) * sum;
}

CMat assemble_dense(const RwgBasis& basis, double k, const AssemblyOptions& opts) {
  const int n = basis.size();
  if (n > opts.dense_cap)
    throw std::runtime_error("assemble_dense: N=" + std::to_string(n) + " exceeds cap " +
                             std::to_string(opts.dense_cap));
  CMat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const cplx v = galerkin_entry(basis, i, j, k, opts);
      z(i, j) = v;
      z(j, i) = v;
    }
  return z;
}

NearBlock assemble_near(const RwgBasis& basis, const Octree& tree, double k,
                        const AssemblyOptions& opts) {
  const int n = basis.size();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (const auto& [i, j] : tree.near_basis_pairs())
    trips.emplace_back(i, j, galerkin_entry(basis, i, j, k, opts));
  NearBlock z(n, n);
  z.setFromTriplets(trips.begin(), trips.end());
  z.makeCompressed();
  return z;
}

namespace {

void write_header(std::ofstream& out, const char magic[4], uint32_t n, double k,
                  const AssemblyOptions& opts) {
  out.write(magic, 4);
  const uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&k), 8);
  const uint32_t fo = opts.far_order, no = opts.near_order;
  out.write(reinterpret_cast<const char*>(&fo), 4);
  out.write(reinterpret_cast<const char*>(&no), 4);
}

uint32_t read_header(std::ifstream& in, const char magic[4], double* k_out) {
  char m[4];
  in.read(m, 4);
  if (!in || std::memcmp(m, magic, 4) != 0) throw std::runtime_error("bad matrix file magic");
  uint32_t version, n, fo, no;
  double k;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&k), 8);
  in.read(reinterpret_cast<char*>(&fo), 4);
  in.read(reinterpret_cast<char*>(&no), 4);
  if (!in) throw std::runtime_error("truncated matrix file header");
  if (k_out) *k_out = k;
  return n;
}

}  // namespace

void dump_dense(const CMat& z, double k, const AssemblyOptions& opts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_header(out, "CMZD", static_cast<uint32_t>(z.rows()), k, opts);
  out.write(reinterpret_cast<const char*>(z.data()), sizeof(cplx) * z.size());
  if (!out) throw std::runtime_error("write failed: " + path);
}

CMat load_dense(const std::string& path, double* k_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  const uint32_t n = read_header(in, "CMZD", k_out);
  CMat z(n, n);
  in.read(reinterpret_cast<char*>(z.data()), sizeof(cplx) * z.size());
  if (!in) throw std::runtime_error("truncated matrix file: " + path);
  return z;
}

void dump_near(const NearBlock& z, double k, const AssemblyOptions& opts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_header(out, "CMZN", static_cast<uint32_t>(z.rows()), k, opts);
  const uint64_t nnz = z.nonZeros();
  out.write(reinterpret_cast<const char*>(&nnz), 8);
  out.write(reinterpret_cast<const char*>(z.outerIndexPtr()), sizeof(int) * (z.outerSize() + 1));
  out.write(reinterpret_cast<const char*>(z.innerIndexPtr()), sizeof(int) * nnz);
  out.write(reinterpret_cast<const char*>(z.valuePtr()), sizeof(cplx) * nnz);
  if (!out) throw std::runtime_error("write failed: " + path);
}

NearBlock load_near(const std::string& path, double* k_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  const uint32_t n = read_header(in, "CMZN", k_out);
  uint64_t nnz;
  in.read(reinterpret_cast<char*>(&nnz), 8);
  NearBlock z(n, n);
  z.resizeNonZeros(nnz);
  in.read(reinterpret_cast<char*>(z.outerIndexPtr()), sizeof(int) * (n + 1));
  in.read(reinterpret_cast<char*>(z.innerIndexPtr()), sizeof(int) * nnz);
  in.read(reinterpret_cast<char*>(z.valuePtr()), sizeof(cplx) * nnz);
  if (!in) throw std::runtime_error("truncated matrix file: " + path);
  return z;
}

}  // namespace cmfma
