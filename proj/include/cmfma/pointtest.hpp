// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cmfma/translator.hpp"

namespace cmfma {

enum class PointCase { Case1, Case2 };

/// Relative error of the sampled plane-wave decomposition of e^{ikr}/r,
/// cos(kr)/r, or sin(kr)/r against the exact kernel, at the two fixed
/// source/observer placements of the validation study. Case 1 satisfies
/// |r_im + r_m'j| < |r_mm'|; Case 2 violates it.
double point_decomposition_error(Kernel kernel, PointCase pcase, double a_over_lambda,
                                 int digits);

}  // namespace cmfma
