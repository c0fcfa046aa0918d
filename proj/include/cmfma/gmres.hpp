// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "cmfma/types.hpp"

namespace cmfma {

using MatVec = std::function<CVec(const CVec&)>;

struct SolveOptions {
  double tol = 1e-3;  // relative residual target
  int restart = 60;   // GMRES restart length
  int maxit = 2000;   // total iteration cap
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // recomputed as ||b - A x|| / ||b||, not the estimate
  bool converged = false;
  std::vector<double> history;  // per-iteration residual estimates
};

/// Restarted GMRES. When a preconditioner is given it is applied on the
/// right (solve A P y = b, x = P y), so the reported residual is the true
/// residual of the original system.
CVec gmres(const MatVec& apply_a, const CVec& b, const SolveOptions& opts = {},
           const MatVec* precond = nullptr, SolveReport* report = nullptr);

/// BiCGSTAB behind the same interface; also right-preconditioned.
CVec bicgstab(const MatVec& apply_a, const CVec& b, const SolveOptions& opts = {},
              const MatVec* precond = nullptr, SolveReport* report = nullptr);

}  // namespace cmfma
