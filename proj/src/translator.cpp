// SPDX-License-Identifier: Apache-2.0
#include "cmfma/translator.hpp"

#include <cmath>
#include <stdexcept>

#include "cmfma/specfun.hpp"

namespace cmfma {

std::vector<cplx> translator(Kernel kernel, int truncation, double k, const Vec3& r_mm,
                             const SphereQuadrature& quad) {
  const double r = r_mm.norm();
  if (r <= 0.0) throw std::invalid_argument("translator: zero offset");
  const Vec3 rhat = r_mm / r;
  const double kr = k * r;

  // i^l (2l+1) c_l(kr) per order.
  std::vector<cplx> coef(truncation + 1);
  const cplx iu(0.0, 1.0);
  cplx il(1.0, 0.0);
  switch (kernel) {
    case Kernel::Helmholtz: {
      const auto h = sph_hankel1(truncation, kr);
      for (int l = 0; l <= truncation; ++l, il *= iu) coef[l] = il * (2.0 * l + 1.0) * h[l];
      break;
    }
    case Kernel::Cos: {
      const auto y = sph_neumann_y(truncation, kr);
      for (int l = 0; l <= truncation; ++l, il *= iu) coef[l] = iu * il * (2.0 * l + 1.0) * y[l];
      break;
    }
    case Kernel::Sin: {
      const auto j = sph_bessel_j(truncation, kr);
      for (int l = 0; l <= truncation; ++l, il *= iu) coef[l] = -iu * il * (2.0 * l + 1.0) * j[l];
      break;
    }
  }

  std::vector<cplx> alpha(quad.size());
  for (int q = 0; q < quad.size(); ++q) {
    const double mu = quad.directions()[q].dot(rhat);
    const auto p = legendre_p(truncation, std::clamp(mu, -1.0, 1.0));
    cplx s(0.0, 0.0);
    for (int l = 0; l <= truncation; ++l) s += coef[l] * p[l];
    alpha[q] = s;
  }
  return alpha;
}

TranslatorTable::TranslatorTable(Kernel kernel, int truncation, double k, double box_size,
                                 const std::vector<std::array<int, 3>>& offsets,
                                 const SphereQuadrature& quad) {
  for (const auto& off : offsets) {
    if (table_.count(off)) continue;
    const Vec3 r_mm = box_size * Vec3(off[0], off[1], off[2]);
    table_[off] = translator(kernel, truncation, k, r_mm, quad);
  }
}

const std::vector<cplx>& TranslatorTable::at(const std::array<int, 3>& offset) const {
  auto it = table_.find(offset);
  if (it == table_.end()) throw std::out_of_range("TranslatorTable: offset not tabulated");
  return it->second;
}

}  // namespace cmfma
