// SPDX-License-Identifier: Apache-2.0
#include "cmfma/spherequad.hpp"

#include <cmath>
#include <stdexcept>

#include "cmfma/quadrature.hpp"

namespace cmfma {

int truncation_number(double a_over_lambda, int digits) {
  if (a_over_lambda <= 0.0 || digits < 1)
    throw std::invalid_argument("truncation_number: bad arguments");
  const double kd = 2.0 * kPi * std::sqrt(3.0) * a_over_lambda;
  return static_cast<int>(std::ceil(kd + 1.8 * std::pow(double(digits), 2.0 / 3.0) *
                                             std::cbrt(kd)));
}

SphereQuadrature::SphereQuadrature(int truncation) : trunc_(truncation) {
  if (truncation < 0) throw std::invalid_argument("SphereQuadrature: negative truncation");
  const GaussLegendre gl = gauss_legendre(n_theta());
  const int np = n_phi();
  dirs_.reserve(size());
  weights_.reserve(size());
  cos_theta_ = gl.nodes;  // cos(theta) runs from -1 to 1
  const double wphi = 2.0 * kPi / np;
  for (int it = 0; it < n_theta(); ++it) {
    const double ct = gl.nodes[it];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int ip = 0; ip < np; ++ip) {
      const double p = phi(ip);
      dirs_.emplace_back(st * std::cos(p), st * std::sin(p), ct);
      weights_.push_back(gl.weights[it] * wphi);
    }
  }
}

}  // namespace cmfma
