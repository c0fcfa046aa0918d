// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "cmfma/assembly.hpp"
#include "cmfma/meshgen.hpp"
#include "cmfma/octree.hpp"
#include "cmfma/quadrature.hpp"
#include "cmfma/specfun.hpp"

using namespace cmfma;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

std::string temp_path(const std::string& name) {
  return std::string("./") + name;
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials to degree 2n-1") {
  for (int n : {2, 5, 16}) {
    const auto gl = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : gl.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double acc = 0.0;
      for (size_t i = 0; i < gl.nodes.size(); ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], deg);
      const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("triangle rules integrate barycentric monomials exactly") {
  // int l1^a l2^b l3^c dA over the unit triangle (area normalized to 1)
  // equals a! b! c! 2! / (a+b+c+2)!.
  const std::map<int, int> degree{{1, 1}, {3, 2}, {7, 5}, {16, 8}};
  for (const auto& [npts, deg] : degree) {
    const auto& rule = triangle_rule(npts);
    double wsum = 0.0;
    for (const auto& q : rule) wsum += q.w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        const int c = 0;
        double acc = 0.0;
        for (const auto& q : rule) acc += q.w * std::pow(q.l1, a) * std::pow(q.l2, b) * std::pow(q.l3, c);
        const double exact =
            factorial(a) * factorial(b) * factorial(c) * 2.0 / factorial(a + b + c + 2);
        // Published rule constants carry ~10 significant digits.
        CHECK(acc == doctest::Approx(exact).epsilon(5e-9));
      }
  }
  CHECK_THROWS(triangle_rule(5));
}

TEST_CASE("spherical bessel and neumann match frozen high-precision values") {
  // Frozen from an independent arbitrary-precision evaluation.
  struct Row {
    double x;
    double j[6];
    double y[6];
  };
  const int ls[6] = {0, 1, 2, 5, 10, 20};
  const Row rows[] = {
      {0.7,
       {9.2031098176813009e-01, 2.2209827783377389e-01, 3.1538780376614742e-02,
        1.5866115512568329e-05, 2.0326908136586268e-12, 6.0503656756989725e-29},
       {-1.0926316961206979e+00, -2.4812134047976984e+00, -9.5411400387265815e+00,
        -8.2549167247215064e+03, -3.3541892120105015e+10, -5.7622277729214886e+26}},
      {3.141592653589793,  // j0 vanishes here; the recurrence must survive it
       {3.8981718325193755e-17, 3.1830988618379069e-01, 3.0396355092701327e-01,
        1.9935413383293583e-02, 5.4855465901421119e-06, 5.9610703430691103e-16},
       {3.1830988618379069e-01, 1.0132118364233775e-01, -2.2155528288419224e-01,
        -1.8089422000677740e+00, -2.8974781694665680e+03, -1.3180009732573025e+13}},
      {15.3,
       {2.5930756413765493e-02, 6.1690296524709719e-02, -1.3834619840293001e-02,
        5.6530129410597318e-02, -1.4720350678758182e-02, 2.0339257673905936e-03},
       {5.9995475844071451e-02, -2.2009483482780430e-02, -6.4311060840695072e-02,
        3.7104427572324468e-02, 7.4866265292923367e-02, -1.1904375437855559e+00}}};
  for (const auto& row : rows) {
    const auto j = sph_bessel_j(20, row.x);
    const auto y = sph_neumann_y(20, row.x);
    const auto h = sph_hankel1(20, row.x);
    for (int i = 0; i < 6; ++i) {
      const int l = ls[i];
      CHECK(j[l] == doctest::Approx(row.j[i]).epsilon(1e-12));
      CHECK(y[l] == doctest::Approx(row.y[i]).epsilon(1e-12));
      CHECK(h[l].real() == doctest::Approx(j[l]).epsilon(1e-14));
      CHECK(h[l].imag() == doctest::Approx(y[l]).epsilon(1e-14));
    }
    // Cross-product identity j_{l+1} y_l - j_l y_{l+1} = 1/x^2.
    for (int l = 0; l < 20; ++l)
      CHECK(j[l + 1] * y[l] - j[l] * y[l + 1] ==
            doctest::Approx(1.0 / (row.x * row.x)).epsilon(1e-10));
  }
}

TEST_CASE("legendre polynomials match frozen values and recurrence bounds") {
  const int ls[5] = {0, 1, 2, 5, 13};
  const double at_m03[5] = {1.0, -0.3, -0.365, -0.34538625, 1.8391780445464601e-01};
  const double at_0912[5] = {1.0, 0.912, 0.747616, 4.1176701591552206e-02,
                             6.3211088183471958e-02};
  const auto pa = legendre_p(13, -0.3);
  const auto pb = legendre_p(13, 0.912);
  for (int i = 0; i < 5; ++i) {
    CHECK(pa[ls[i]] == doctest::Approx(at_m03[i]).epsilon(1e-13));
    CHECK(pb[ls[i]] == doctest::Approx(at_0912[i]).epsilon(1e-13));
  }
  for (double v : legendre_p(40, 0.73)) CHECK(std::abs(v) <= 1.0 + 1e-14);
}

TEST_CASE("generated meshes have the expected basis counts and pass validation") {
  const auto plate = make_plate(1.0, 0.6, 33, 10);
  plate.validate();
  CHECK(RwgBasis(plate).size() == 3 * 33 * 10 - 33 - 10);  // 947
  const auto sph = make_cube_sphere(0.75, 7);
  sph.validate();
  CHECK(sph.num_triangles() == 12 * 7 * 7);
  CHECK(RwgBasis(sph).size() == 18 * 7 * 7);
  for (const auto& v : sph.vertices()) CHECK(v.norm() == doctest::Approx(0.75).epsilon(1e-12));
  const auto tet = make_tetrahedron(0.4);
  tet.validate();
  CHECK(RwgBasis(tet).size() == 6);
}

TEST_CASE("mesh validation rejects broken inputs") {
  // Inconsistent orientation: shared edge traversed the same way twice.
  CHECK_THROWS_AS(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}},
                              {{0, 1, 2}, {1, 2, 3}})
                      .validate(),
                  MeshError);
  SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {{0, 1, 2}, {1, 3, 2}}).validate();
  // Degenerate triangle.
  CHECK_THROWS_AS(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}).validate(),
                  MeshError);
  // Non-manifold: three triangles on one edge.
  CHECK_THROWS_AS(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}},
                              {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}})
                      .validate(),
                  MeshError);
}

TEST_CASE("off and msh round trips preserve the mesh") {
  const auto plate = make_plate(0.4, 0.2, 4, 2);
  const auto path = temp_path("roundtrip.off");
  write_mesh_off(plate, path);
  const auto back = load_mesh(path, MeshFormat::Off);
  REQUIRE(back.num_vertices() == plate.num_vertices());
  REQUIRE(back.num_triangles() == plate.num_triangles());
  for (int i = 0; i < plate.num_vertices(); ++i)
    CHECK((back.vertices()[i] - plate.vertices()[i]).norm() < 1e-12);
  std::remove(path.c_str());

  const auto msh = temp_path("sample.msh");
  {
    std::ofstream f(msh);
    f << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n"
         "1 0 0 0\n2 1 0 0\n3 0 1 0\n4 1 1 0\n$EndNodes\n"
         "$Elements\n3\n"
         "1 1 2 0 1 1 2\n"          // line element, must be skipped
         "2 2 2 0 1 1 2 3\n3 2 2 0 1 2 4 3\n$EndElements\n";
  }
  const auto m2 = load_mesh(msh, MeshFormat::Auto);
  CHECK(m2.num_triangles() == 2);
  CHECK(RwgBasis(m2).size() == 1);
  std::remove(msh.c_str());
  CHECK_THROWS_AS(load_mesh("no_such_file.off"), MeshError);
}

TEST_CASE("rwg basis: divergence, edge continuity, free-vertex zero") {
  const auto plate = make_plate(0.5, 0.5, 3, 3);
  const RwgBasis basis(plate);
  const auto& mesh = basis.mesh();
  for (int n = 0; n < basis.size(); ++n) {
    const auto& e = basis.edge(n);
    const Vec3 vfree_p = mesh.vertices()[e.free_plus];
    double div = 0.0;
    CHECK(basis.evaluate(n, e.tri_plus, vfree_p, &div).norm() < 1e-14);
    CHECK(div == doctest::Approx(e.length / mesh.triangle_area(e.tri_plus)).epsilon(1e-12));
    basis.evaluate(n, e.tri_minus, mesh.triangle_center(e.tri_minus), &div);
    CHECK(div == doctest::Approx(-e.length / mesh.triangle_area(e.tri_minus)).epsilon(1e-12));

    // Normal component across the shared edge is continuous (flat mesh:
    // the full vector difference lies along the edge).
    const Vec3 mid = 0.5 * (mesh.vertices()[e.v1] + mesh.vertices()[e.v2]);
    const Vec3 fp = basis.evaluate(n, e.tri_plus, mid);
    const Vec3 fm = basis.evaluate(n, e.tri_minus, mid);
    const Vec3 edge = (mesh.vertices()[e.v2] - mesh.vertices()[e.v1]).normalized();
    const Vec3 diff = fp - fm;
    CHECK((diff - diff.dot(edge) * edge).norm() < 1e-12);
  }
}

TEST_CASE("octree boxes contain their member centroids and lists partition pairs") {
  const auto plate = make_plate(1.0, 0.6, 33, 10);
  const RwgBasis basis(plate);
  const double k = wavenumber(300e6);
  const Octree tree(basis, k, 0.25);
  REQUIRE(!tree.dense_fallback());
  REQUIRE(tree.finest_level() >= 2);
  const int lf = tree.finest_level();

  for (int n = 0; n < basis.size(); ++n) {
    const Vec3 c = tree.box_center(lf, tree.box_of(n));
    CHECK((basis.centroid(n) - c).cwiseAbs().maxCoeff() <= 0.5 * tree.box_size(lf) + 1e-12);
  }

  const int nb = static_cast<int>(tree.level(lf).boxes.size());
  // Box-pair coverage matrix: near once, or translated exactly once.
  std::vector<std::vector<int>> cover(nb, std::vector<int>(nb, 0));
  for (int b = 0; b < nb; ++b)
    for (int nb2 : tree.level(lf).boxes[b].near) cover[b][nb2] += 1;

  // Translated pairs map down to finest-level descendants.
  std::vector<std::vector<std::vector<int>>> leaves(tree.num_levels());
  for (int l = lf; l >= 0; --l) {
    leaves[l].resize(tree.level(l).boxes.size());
    for (size_t b = 0; b < tree.level(l).boxes.size(); ++b) {
      if (l == lf) {
        leaves[l][b] = {static_cast<int>(b)};
      } else {
        for (int ch : tree.level(l).boxes[b].children)
          for (int leaf : leaves[l + 1][ch]) leaves[l][b].push_back(leaf);
      }
    }
  }
  for (int l = 2; l <= lf; ++l)
    for (const auto& [obs, src] : tree.translation_pairs(l, ListMode::Standard))
      for (int lo : leaves[l][obs])
        for (int ls : leaves[l][src]) cover[lo][ls] += 1;
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) CHECK(cover[a][b] == 1);

  // All-translate: every box pair not sharing the finest box is translated
  // exactly once, at the level where the ancestors first differ.
  std::vector<std::vector<int>> cover2(nb, std::vector<int>(nb, 0));
  for (int l = 1; l <= lf; ++l)
    for (const auto& [obs, src] : tree.translation_pairs(l, ListMode::AllTranslate))
      for (int lo : leaves[l][obs])
        for (int ls : leaves[l][src]) cover2[lo][ls] += 1;
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) CHECK(cover2[a][b] == (a == b ? 0 : 1));
}

TEST_CASE("single-box meshes fall back to dense bookkeeping") {
  const auto tet = make_tetrahedron(0.05);
  const RwgBasis basis(tet);
  const Octree tree(basis, wavenumber(300e6), 0.25);
  CHECK(tree.dense_fallback());
  for (int l = 1; l <= tree.finest_level(); ++l) {
    CHECK(tree.translation_pairs(l, ListMode::Standard).empty());
    CHECK(tree.translation_pairs(l, ListMode::AllTranslate).empty());
  }
  CHECK(tree.near_basis_pairs().size() == size_t(basis.size()) * basis.size());
}

TEST_CASE("galerkin entries match an independent brute-force quadrature on far pairs") {
  const auto plate = make_plate(1.0, 0.6, 8, 5);
  const RwgBasis basis(plate);
  const double k = wavenumber(300e6);
  const double eta = kFreeSpaceEta;

  // Pick a pair of bases on well-separated triangles.
  int i = 0, j = -1;
  for (int n = 1; n < basis.size(); ++n) {
    if ((basis.centroid(n) - basis.centroid(i)).norm() > 0.7) {
      j = n;
      break;
    }
  }
  REQUIRE(j > 0);

  // Independent oracle: plain tensor quadrature of the mixed-potential
  // form over all four triangle pairs.
  const auto& rule = triangle_rule(16);
  const auto& mesh = basis.mesh();
  cplx acc(0, 0);
  for (int ti : {basis.edge(i).tri_plus, basis.edge(i).tri_minus})
    for (int tj : {basis.edge(j).tri_plus, basis.edge(j).tri_minus}) {
      const auto& t1 = mesh.triangles()[ti];
      const auto& t2 = mesh.triangles()[tj];
      for (const auto& qa : rule)
        for (const auto& qb : rule) {
          const Vec3 ra = tri_point(qa, mesh.vertices()[t1[0]], mesh.vertices()[t1[1]],
                                    mesh.vertices()[t1[2]]);
          const Vec3 rb = tri_point(qb, mesh.vertices()[t2[0]], mesh.vertices()[t2[1]],
                                    mesh.vertices()[t2[2]]);
          double divi = 0.0, divj = 0.0;
          const Vec3 fi = basis.evaluate(i, ti, ra, &divi);
          const Vec3 fj = basis.evaluate(j, tj, rb, &divj);
          const double r = (ra - rb).norm();
          const cplx g = std::exp(cplx(0, k * r)) / r;
          acc += qa.w * qb.w * mesh.triangle_area(ti) * mesh.triangle_area(tj) * g *
                 (fi.dot(fj) - divi * divj / (k * k));
        }
    }
  const cplx oracle = cplx(0, 1) * k * eta * acc;
  const cplx got = galerkin_entry(basis, i, j, k);
  CHECK(std::abs(got - oracle) / std::abs(oracle) < 1e-5);

  // Bitwise symmetry.
  const cplx swapped = galerkin_entry(basis, j, i, k);
  CHECK(got.real() == swapped.real());
  CHECK(got.imag() == swapped.imag());
}

TEST_CASE("static potentials agree with refined numeric integration off-plane") {
  const Vec3 v1(0, 0, 0), v2(0.2, 0, 0), v3(0.05, 0.15, 0);
  const Vec3 r(0.07, 0.04, 0.11);  // off the triangle plane: integrand smooth
  const auto sp = static_potentials(v1, v2, v3, r);
  const auto& rule = triangle_rule(16);
  const double area = 0.5 * ((v2 - v1).cross(v3 - v1)).norm();
  double i0 = 0.0;
  Vec3 iv = Vec3::Zero();
  // Refine by uniform 4-way subdivision for an independent high-accuracy value.
  std::vector<std::array<Vec3, 3>> tris{{v1, v2, v3}};
  for (int lvl = 0; lvl < 4; ++lvl) {
    std::vector<std::array<Vec3, 3>> next;
    for (const auto& t : tris) {
      const Vec3 m12 = 0.5 * (t[0] + t[1]), m23 = 0.5 * (t[1] + t[2]), m13 = 0.5 * (t[0] + t[2]);
      next.push_back({t[0], m12, m13});
      next.push_back({m12, t[1], m23});
      next.push_back({m13, m23, t[2]});
      next.push_back({m12, m23, m13});
    }
    tris.swap(next);
  }
  const Vec3 proj(r.x(), r.y(), 0.0);  // projection of r onto the triangle plane
  for (const auto& t : tris) {
    const double a = 0.5 * ((t[1] - t[0]).cross(t[2] - t[0])).norm();
    for (const auto& q : rule) {
      const Vec3 p = tri_point(q, t[0], t[1], t[2]);
      const double rr = (p - r).norm();
      i0 += q.w * a / rr;
      iv += q.w * a * (p - proj) / rr;
    }
  }
  (void)area;
  CHECK(sp.i0 == doctest::Approx(i0).epsilon(1e-9));
  CHECK((sp.ivec - iv).norm() < 1e-9 * iv.norm());
}

TEST_CASE("near block entries coincide bitwise with dense assembly") {
  const auto plate = make_plate(0.8, 0.5, 6, 4);
  const RwgBasis basis(plate);
  const double k = wavenumber(300e6);
  const Octree tree(basis, k, 0.25);
  const CMat z = assemble_dense(basis, k);
  const NearBlock nearz = assemble_near(basis, tree, k);
  int checked = 0;
  for (int c = 0; c < nearz.outerSize(); ++c)
    for (NearBlock::InnerIterator it(nearz, c); it; ++it) {
      CHECK(it.value().real() == z(it.row(), it.col()).real());
      CHECK(it.value().imag() == z(it.row(), it.col()).imag());
      ++checked;
    }
  CHECK(checked > basis.size());
}

TEST_CASE("matrix dumps round-trip bitwise") {
  const auto plate = make_plate(0.4, 0.4, 3, 3);
  const RwgBasis basis(plate);
  const double k = wavenumber(250e6);
  const AssemblyOptions opts;
  const CMat z = assemble_dense(basis, k, opts);
  const auto pd = temp_path("z.cmzd");
  dump_dense(z, k, opts, pd);
  double kk = 0.0;
  const CMat back = load_dense(pd, &kk);
  CHECK(kk == k);
  REQUIRE(back.rows() == z.rows());
  CHECK((back - z).cwiseAbs().maxCoeff() == 0.0);
  std::remove(pd.c_str());

  const Octree tree(basis, k, 0.25);
  const NearBlock nb = assemble_near(basis, tree, k);
  const auto pn = temp_path("z.cmzn");
  dump_near(nb, k, opts, pn);
  const NearBlock nb2 = load_near(pn, &kk);
  CHECK(kk == k);
  REQUIRE(nb2.nonZeros() == nb.nonZeros());
  CHECK((CMat(nb2) - CMat(nb)).cwiseAbs().maxCoeff() == 0.0);
  std::remove(pn.c_str());
}
