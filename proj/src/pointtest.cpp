// SPDX-License-Identifier: Apache-2.0
#include "cmfma/pointtest.hpp"

#include <cmath>

#include "cmfma/spherequad.hpp"

namespace cmfma {

double point_decomposition_error(Kernel kernel, PointCase pcase, double a, int digits) {
  const double k = 2.0 * kPi;  // a is measured in wavelengths

  const Vec3 src(0.9999 * a, a, 0.0);
  const Vec3 src_center(0.5 * a, 0.5 * a, 0.5 * a);
  const Vec3 obs = (pcase == PointCase::Case1) ? Vec3(2.9999 * a, 0.0, a)
                                               : Vec3(1.0001 * a, 0.0, 0.0);
  const Vec3 obs_center = (pcase == PointCase::Case1) ? Vec3(2.5 * a, 0.5 * a, 0.5 * a)
                                                      : Vec3(1.5 * a, 0.5 * a, 0.5 * a);

  const int trunc = truncation_number(a, digits);
  const SphereQuadrature quad(trunc);
  const auto alpha = translator(kernel, trunc, k, obs_center - src_center, quad);

  const Vec3 shift = (obs - obs_center) + (src_center - src);  // r_im + r_m'j
  cplx rhs(0.0, 0.0);
  for (int q = 0; q < quad.size(); ++q) {
    const cplx phase = std::exp(cplx(0.0, k * quad.directions()[q].dot(shift)));
    rhs += quad.weights()[q] * phase * alpha[q];
  }
  rhs *= cplx(0.0, k / (4.0 * kPi));

  const double r = (obs - src).norm();
  cplx lhs;
  switch (kernel) {
    case Kernel::Helmholtz: lhs = std::exp(cplx(0.0, k * r)) / r; break;
    case Kernel::Cos: lhs = std::cos(k * r) / r; break;
    case Kernel::Sin: lhs = std::sin(k * r) / r; break;
  }
  return std::abs(lhs - rhs) / std::abs(lhs);
}

}  // namespace cmfma
