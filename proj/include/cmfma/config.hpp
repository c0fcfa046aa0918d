// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "cmfma/mesh.hpp"
#include "cmfma/sai.hpp"

namespace cmfma {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Backend { MlfmaIra, DenseQz };
enum class Transform { Sep1, Sep };
enum class InnerSolver { Gmres, Bicgstab };
enum class Precond { Sai, None };

/// Flat key-value run configuration (TOML syntax: comments with '#',
/// `key = value`, quoted strings; no tables). Unknown keys are rejected.
struct RunConfig {
  // Geometry: either a mesh file or a named built-in generator.
  std::string mesh_path;
  MeshFormat mesh_format = MeshFormat::Auto;
  std::string geometry;     // "plate" | "sphere" (built-ins), empty = use mesh_path
  double geom_size = 0.0;   // plate: lx (ly = 0.6 lx); sphere: radius, meters
  int geom_density = 0;     // plate: nx (ny = ~0.3 nx); sphere: cells per cube face

  // Frequency: single point or sweep (start/stop/step all set).
  double frequency_hz = 0.0;
  double sweep_start_hz = 0.0, sweep_stop_hz = 0.0, sweep_step_hz = 0.0;
  bool is_sweep() const { return sweep_step_hz > 0.0; }

  Backend backend = Backend::MlfmaIra;
  Transform transform = Transform::Sep1;
  int nev = 5;
  int ncv = 20;
  double outer_tol = 1e-8;
  int max_outer = 300;
  uint64_t seed = 1;

  InnerSolver inner_solver = InnerSolver::Gmres;
  double inner_tol = 1e-3;
  int inner_restart = 60;
  int inner_maxit = 2000;

  Precond precond = Precond::Sai;
  SaiOptions sai{};

  int d0 = 3;
  double target_box = 0.25;  // finest box size over lambda
  int dense_cap = 5000;

  std::string output_dir = "out";
  bool write_vtk = false;
  bool write_modes = true;
  int tracked_modes = 4;     // curves emitted by a sweep

  /// Throws ConfigError listing every violated range or missing field.
  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace cmfma
