// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cmfma/types.hpp"

namespace cmfma {

/// Series cutoff L = ceil(kd + 1.8 d0^{2/3} (kd)^{1/3}) for a box of edge
/// a (in wavelengths), diameter d = sqrt(3) a, and d0 digits of accuracy.
int truncation_number(double a_over_lambda, int digits);

/// Ewald-sphere sampling for truncation number L: Gauss-Legendre in theta
/// (L+1 points), uniform in phi (2L+2 points). Weights sum to 4*pi.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int truncation);

  int truncation() const { return trunc_; }
  int n_theta() const { return trunc_ + 1; }
  int n_phi() const { return 2 * trunc_ + 2; }
  int size() const { return n_theta() * n_phi(); }

  /// Row-major index (theta-major): q = it * n_phi + ip.
  const std::vector<Vec3>& directions() const { return dirs_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& cos_theta() const { return cos_theta_; }
  double phi(int ip) const { return 2.0 * kPi * ip / n_phi(); }

 private:
  int trunc_;
  std::vector<Vec3> dirs_;
  std::vector<double> weights_;
  std::vector<double> cos_theta_;
};

}  // namespace cmfma
