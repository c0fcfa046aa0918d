// SPDX-License-Identifier: Apache-2.0
#include "cmfma/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmfma {

std::vector<double> sph_bessel_j(int lmax, double x) {
  std::vector<double> j(lmax + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double j0 = std::sin(x) / x;
  if (lmax == 0) {
    j[0] = j0;
    return j;
  }
  // Downward recurrence from a start order well above both lmax and x.
  // Normalized against whichever of j_0, j_1 is larger in magnitude: near a
  // zero of j_0 the unnormalized recurrence value has no relative accuracy
  // there, so pinning the scale to it would corrupt every order.
  const int nstart = lmax + std::max(20, static_cast<int>(std::ceil(1.5 * std::abs(x)))) + 15;
  double fp1 = 0.0;   // f_{l+1}
  double f = 1e-300;  // f_l (arbitrary small seed)
  std::vector<double> tmp(lmax + 1, 0.0);
  for (int l = nstart; l >= 1; --l) {
    const double fm1 = (2.0 * l + 1.0) / x * f - fp1;
    fp1 = f;
    f = fm1;
    if (l - 1 <= lmax) tmp[l - 1] = f;
    // Rescale to avoid overflow of the unnormalized recurrence.
    if (std::abs(f) > 1e250) {
      const double s = 1e-250;
      f *= s;
      fp1 *= s;
      for (double& t : tmp) t *= s;
    }
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const double scale =
      (std::abs(j0) >= std::abs(j1)) ? j0 / tmp[0] : j1 / tmp[1];
  for (int l = 0; l <= lmax; ++l) j[l] = tmp[l] * scale;
  return j;
}

std::vector<double> sph_neumann_y(int lmax, double x) {
  if (x <= 0.0) throw std::domain_error("sph_neumann_y: x must be positive");
  std::vector<double> y(lmax + 1);
  y[0] = -std::cos(x) / x;
  if (lmax == 0) return y;
  y[1] = (-std::cos(x) / x - std::sin(x)) / x;
  for (int l = 2; l <= lmax; ++l) {
    y[l] = (2.0 * l - 1.0) / x * y[l - 1] - y[l - 2];
    if (!std::isfinite(y[l]))
      throw std::overflow_error("sph_neumann_y: overflow at order " + std::to_string(l) +
                                ", argument " + std::to_string(x));
  }
  return y;
}

std::vector<std::complex<double>> sph_hankel1(int lmax, double x) {
  const auto j = sph_bessel_j(lmax, x);
  const auto y = sph_neumann_y(lmax, x);
  std::vector<std::complex<double>> h(lmax + 1);
  for (int l = 0; l <= lmax; ++l) h[l] = {j[l], y[l]};
  return h;
}

std::vector<double> legendre_p(int lmax, double x) {
  std::vector<double> p(lmax + 1);
  p[0] = 1.0;
  if (lmax == 0) return p;
  p[1] = x;
  for (int l = 2; l <= lmax; ++l)
    p[l] = ((2.0 * l - 1.0) * x * p[l - 1] - (l - 1.0) * p[l - 2]) / l;
  return p;
}

}  // namespace cmfma
