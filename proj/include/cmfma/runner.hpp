// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cmfma/cm.hpp"
#include "cmfma/config.hpp"

namespace cmfma {

struct FrequencyResult {
  CmSolution solution;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  int levels = 0;  // octree levels including level-0 (1 for the dense path)
};

struct RunResult {
  int n = 0;  // unknowns
  std::vector<FrequencyResult> points;           // one per frequency, ascending
  std::vector<std::vector<double>> curves;       // [tracked mode][point] lambda
  std::vector<double> step_confidence;           // per sweep step, size points-1
  std::string summary_json;
  bool converged = true;  // false if any point hit max_outer or an inner failure
};

/// Resolve the configured geometry (file or built-in generator).
SurfaceMesh mesh_from_config(const RunConfig& cfg);

/// Solve (or sweep) per the config and write eigenvalues.csv, per-point mode
/// JSON, summary.json, optional VTK, and tracked.csv for sweeps under
/// cfg.output_dir. Outputs are deterministic for a fixed config and mesh.
RunResult run(const RunConfig& cfg);

/// Per-triangle current magnitude of a mode (RWG sum evaluated at the
/// triangle centroid), used for the VTK output.
RVec triangle_current_magnitude(const RwgBasis& basis, const CVec& j);

}  // namespace cmfma
