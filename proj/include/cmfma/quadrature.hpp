// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "cmfma/types.hpp"

namespace cmfma {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// Symmetric quadrature point on the unit triangle, barycentric coordinates.
/// Weights sum to 1; multiply by the physical triangle area.
struct TriQuadPoint {
  double w;
  double l1, l2, l3;
};

/// Symmetric triangle rules. Supported point counts: 1, 3, 7 (degree 5),
/// 16 (degree 8). Other values throw.
const std::vector<TriQuadPoint>& triangle_rule(int npoints);

/// Map a barycentric point onto a physical triangle.
inline Vec3 tri_point(const TriQuadPoint& q, const Vec3& v1, const Vec3& v2, const Vec3& v3) {
  return q.l1 * v1 + q.l2 * v2 + q.l3 * v3;
}

}  // namespace cmfma
