// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cmfma/assembly.hpp"
#include "cmfma/gmres.hpp"

namespace cmfma {

/// Pattern-selection thresholds for the sparse approximate inverse, all in
/// (0, 1). eps1 keeps near-block entries at or above eps1 * max|entry| as the
/// pattern source; eps2 prunes each retained column below eps2 * its largest
/// retained magnitude; eps3 caps per-column fill at eps3 * the near-pattern
/// column fill. The diagonal is always kept.
struct SaiOptions {
  double eps1 = 0.01;
  double eps2 = 0.014;
  double eps3 = 0.18;
};

/// Named presets from the study configurations.
SaiOptions sai_preset_plate();       // 0.01, 0.014, 0.18
SaiOptions sai_preset_uav();         // 0.01, 0.012, 0.07
SaiOptions sai_preset_dreamliner();  // 0.008, 0.01, 0.07

/// Right preconditioner P minimizing ||I - Z_near P||_F column by column over
/// the prescribed pattern. Columns whose local least-squares problem is
/// degenerate fall back to the Jacobi entry 1/Z_jj.
Eigen::SparseMatrix<cplx> build_sai(const NearBlock& near, const SaiOptions& opts = {});

}  // namespace cmfma
