// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "cmfma/spherequad.hpp"

namespace cmfma {

/// Radial-function variant of the plane-wave translator:
/// Helmholtz uses h_l^(1) (full kernel e^{ikr}/r), Cos uses i*y_l
/// (cos(kr)/r), Sin uses -i*j_l (sin(kr)/r). Helmholtz = Cos + i*Sin.
enum class Kernel { Helmholtz, Cos, Sin };

/// alpha(khat) = sum_{l=0}^{L} i^l (2l+1) c_l(k r_mm') P_l(khat . rhat_mm')
/// sampled over the quadrature directions.
std::vector<cplx> translator(Kernel kernel, int truncation, double k, const Vec3& r_mm,
                             const SphereQuadrature& quad);

/// Per-level table keyed by the integer box offset of a translated pair.
class TranslatorTable {
 public:
  TranslatorTable() = default;
  TranslatorTable(Kernel kernel, int truncation, double k, double box_size,
                  const std::vector<std::array<int, 3>>& offsets, const SphereQuadrature& quad);

  const std::vector<cplx>& at(const std::array<int, 3>& offset) const;

 private:
  std::map<std::array<int, 3>, std::vector<cplx>> table_;
};

}  // namespace cmfma
