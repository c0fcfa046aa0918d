// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "cmfma/fmm.hpp"
#include "cmfma/meshgen.hpp"
#include "cmfma/pointtest.hpp"

using namespace cmfma;

TEST_CASE("truncation number follows the excess-bandwidth formula") {
  for (double a : {0.2, 0.25, 0.5, 1.0})
    for (int d0 : {3, 6}) {
      const double kd = 2.0 * kPi * a * std::sqrt(3.0);
      const int expected = static_cast<int>(
          std::ceil(kd + 1.8 * std::pow(double(d0), 2.0 / 3.0) * std::cbrt(kd)));
      CHECK(truncation_number(a, d0) == expected);
    }
}

TEST_CASE("sphere quadrature integrates band-limited fields exactly") {
  const SphereQuadrature quad(20);
  CHECK(quad.size() == 21 * 42);
  double wsum = 0.0;
  for (double w : quad.weights()) wsum += w;
  CHECK(wsum == doctest::Approx(4.0 * kPi).epsilon(1e-13));

  // int e^{i x khat . d} dOmega = 4 pi j0(x) for |x| within the band limit.
  const Vec3 d = Vec3(0.3, -0.5, 0.81).normalized();
  for (double x : {1.0, 5.0, 12.0}) {
    cplx acc(0, 0);
    for (int q = 0; q < quad.size(); ++q)
      acc += quad.weights()[q] * std::exp(cplx(0, x * quad.directions()[q].dot(d)));
    const double exact = 4.0 * kPi * std::sin(x) / x;
    CHECK(std::abs(acc - cplx(exact, 0)) < 1e-10 * std::abs(exact));
  }
}

TEST_CASE("helmholtz translator equals cos plus i sin translators") {
  const int L = truncation_number(0.25, 3);
  const SphereQuadrature quad(L);
  const double k = wavenumber(300e6);
  const double box = 0.25 * wavelength(300e6);
  const Vec3 r_mm(3.0 * box, -2.0 * box, 2.0 * box);
  const auto h = translator(Kernel::Helmholtz, L, k, r_mm, quad);
  const auto c = translator(Kernel::Cos, L, k, r_mm, quad);
  const auto s = translator(Kernel::Sin, L, k, r_mm, quad);
  REQUIRE(h.size() == size_t(quad.size()));
  double num = 0.0, den = 0.0;
  for (size_t q = 0; q < h.size(); ++q) {
    num += std::abs(h[q] - (c[q] + cplx(0, 1) * s[q]));
    den += std::abs(h[q]);
  }
  CHECK(num / den < 1e-13);
}

TEST_CASE("point decomposition errors sit in the expected regimes") {
  // Sin kernel: accurate in both geometric cases across box sizes.
  for (double a : {0.2, 1.0, 4.0}) {
    CHECK(point_decomposition_error(Kernel::Sin, PointCase::Case1, a, 3) < 1e-3);
    CHECK(point_decomposition_error(Kernel::Sin, PointCase::Case2, a, 3) < 1e-3);
  }
  // Full kernel: accurate when |r_im + r_m'j| < |r_mm'| holds.
  const double e3 = point_decomposition_error(Kernel::Helmholtz, PointCase::Case1, 1.0, 3);
  CHECK(e3 < 1e-3);
  CHECK(point_decomposition_error(Kernel::Helmholtz, PointCase::Case1, 1.0, 6) < e3);
  // Cos kernel: diverged when the case-1 condition is violated.
  CHECK(point_decomposition_error(Kernel::Cos, PointCase::Case2, 1.0, 3) > 0.1);
}

TEST_CASE("signature interpolation: partition of unity and weighted adjoint") {
  const SphereQuadrature fine(18), coarse(11);
  const SignatureInterp interp(fine, coarse, 6);

  CMat ones = CMat::Ones(fine.size(), 1);
  const CMat up = interp.apply(ones);
  for (int q = 0; q < coarse.size(); ++q) CHECK(std::abs(up(q, 0) - 1.0) < 1e-12);

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  CMat x(fine.size(), 2), y(coarse.size(), 2);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = cplx(nd(rng), nd(rng));
  for (int i = 0; i < y.size(); ++i) y.data()[i] = cplx(nd(rng), nd(rng));
  const CMat ix = interp.apply(x);
  const CMat ay = interp.apply_adjoint(y);
  cplx lhs(0, 0), rhs(0, 0);
  for (int c = 0; c < 2; ++c) {
    for (int q = 0; q < coarse.size(); ++q) lhs += coarse.weights()[q] * ix(q, c) * y(q, c);
    for (int q = 0; q < fine.size(); ++q) rhs += fine.weights()[q] * x(q, c) * ay(q, c);
  }
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
}

TEST_CASE("radiation signatures are transverse to the sampling direction") {
  const auto plate = make_plate(0.5, 0.5, 4, 4);
  const RwgBasis basis(plate);
  const double k = wavenumber(300e6);
  const Octree tree(basis, k, 0.25);
  const SphereQuadrature quad(truncation_number(0.25, 3));
  for (int n : {0, 7, basis.size() - 1}) {
    const CMat vs = radiation_signature(basis, tree, quad, k, n);
    REQUIRE(vs.rows() == quad.size());
    REQUIRE(vs.cols() == 3);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec3 khat = quad.directions()[q];
      const cplx proj = vs(q, 0) * khat.x() + vs(q, 1) * khat.y() + vs(q, 2) * khat.z();
      CHECK(std::abs(proj) < 1e-12 * (1.0 + vs.row(q).norm()));
    }
  }
}

TEST_CASE("fast matvecs agree with dense assembly on a plate") {
  const auto plate = make_plate(1.0, 0.6, 33, 10);
  const RwgBasis basis(plate);
  const double k = wavenumber(300e6);
  const CMat z = assemble_dense(basis, k);
  const FmmEngine eng(basis, k);
  REQUIRE(!eng.dense_fallback());

  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  CVec u(basis.size());
  for (int i = 0; i < u.size(); ++i) u[i] = cplx(nd(rng), nd(rng));

  const CVec zu = eng.matvec(FmmOperatorKind::Z, u);
  const CVec xu = eng.matvec(FmmOperatorKind::X, u);
  const CVec ru = eng.matvec(FmmOperatorKind::R, u);
  const CVec rsu = eng.matvec(FmmOperatorKind::RStandard, u);

  const CVec zu_ref = z * u;
  const CVec xu_ref = z.imag() * u;
  const CVec ru_ref = z.real() * u;
  CHECK((zu - zu_ref).norm() / zu_ref.norm() < 1e-3);
  CHECK((xu - xu_ref).norm() / xu_ref.norm() < 1e-3);
  CHECK((ru - ru_ref).norm() / ru_ref.norm() < 2e-3);
  CHECK((rsu - ru_ref).norm() / ru_ref.norm() < 1e-3);

  // Z = RStandard + i X holds to rounding: same lists, split kernels.
  CHECK((zu - (rsu + cplx(0, 1) * xu)).norm() / zu.norm() < 1e-12);
}

TEST_CASE("cos kernel on all-translate lists is rejected") {
  const auto plate = make_plate(1.0, 0.6, 12, 6);
  const RwgBasis basis(plate);
  const FmmEngine eng(basis, wavenumber(300e6));
  CVec u = CVec::Ones(basis.size());
  CHECK_THROWS(eng.far_matvec(Kernel::Cos, ListMode::AllTranslate, u));
  CHECK_NOTHROW(eng.far_matvec(Kernel::Sin, ListMode::AllTranslate, u));
}

TEST_CASE("sub-wavelength meshes fall back to the dense near block") {
  const auto tet = make_tetrahedron(0.05);
  const RwgBasis basis(tet);
  const double k = wavenumber(300e6);
  const FmmEngine eng(basis, k);
  REQUIRE(eng.dense_fallback());
  const CMat z = assemble_dense(basis, k);
  CVec u(basis.size());
  for (int i = 0; i < u.size(); ++i) u[i] = cplx(0.3 * i - 1.0, 0.1 * i);
  const CVec zu = eng.matvec(FmmOperatorKind::Z, u);
  CHECK((zu - z * u).norm() / (z * u).norm() < 1e-14);
}
