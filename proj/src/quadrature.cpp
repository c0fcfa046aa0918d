// SPDX-License-Identifier: Apache-2.0
#include "cmfma/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace cmfma {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

namespace {

std::vector<TriQuadPoint> make_rule(int npoints) {
  std::vector<TriQuadPoint> r;
  auto add1 = [&] { r.push_back({1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}); };
  auto add3 = [&](double w, double a) {
    const double b = 1.0 - 2.0 * a;
    r.push_back({w, a, a, b});
    r.push_back({w, a, b, a});
    r.push_back({w, b, a, a});
  };
  auto add6 = [&](double w, double a, double b) {
    const double c = 1.0 - a - b;
    r.push_back({w, a, b, c});
    r.push_back({w, a, c, b});
    r.push_back({w, b, a, c});
    r.push_back({w, b, c, a});
    r.push_back({w, c, a, b});
    r.push_back({w, c, b, a});
  };
  switch (npoints) {
    case 1:
      add1();
      break;
    case 3:  // degree 2
      add3(1.0 / 3.0, 1.0 / 6.0);
      break;
    case 7:  // degree 5 (Hammer-Stroud)
      r.push_back({0.225, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      add3(0.132394152788506, 0.470142064105115);
      add3(0.125939180544827, 0.101286507323456);
      break;
    case 16:  // degree 8 (Dunavant)
      r.push_back({0.144315607677787, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      add3(0.095091634413923, 0.459292588292723);
      add3(0.103217370534718, 0.170569307751760);
      add3(0.032458497623198, 0.050547228317031);
      add6(0.027230314174435, 0.263112829634638, 0.728492392955404);
      break;
    default:
      throw std::invalid_argument("triangle_rule: unsupported point count " +
                                  std::to_string(npoints));
  }
  // Renormalize away the last-digit truncation of published tables.
  double s = 0.0;
  for (const auto& q : r) s += q.w;
  for (auto& q : r) q.w /= s;
  return r;
}

}  // namespace

const std::vector<TriQuadPoint>& triangle_rule(int npoints) {
  static const std::map<int, std::vector<TriQuadPoint>> cache = {
      {1, make_rule(1)}, {3, make_rule(3)}, {7, make_rule(7)}, {16, make_rule(16)}};
  auto it = cache.find(npoints);
  if (it == cache.end())
    throw std::invalid_argument("triangle_rule: unsupported point count " +
                                std::to_string(npoints));
  return it->second;
}

}  // namespace cmfma
