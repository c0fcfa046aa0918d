// SPDX-License-Identifier: Apache-2.0
#include "cmfma/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace cmfma {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  const long l = static_cast<long>(d);
  if (static_cast<double>(l) != d)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return l;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::string to_string_value(const std::string& key, const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  throw ConfigError("config: key '" + key + "' expects a quoted string, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    // '#' inside a quoted value is part of the value; a flat scan suffices
    // because values never contain escaped quotes.
    std::string stripped = line;
    if (hash != std::string::npos) {
      const auto q1 = line.find('"');
      const auto q2 = q1 == std::string::npos ? std::string::npos : line.find('"', q1 + 1);
      if (q2 == std::string::npos || hash < q1 || hash > q2) stripped = line.substr(0, hash);
    }
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "mesh") {
      cfg.mesh_path = to_string_value(key, val);
    } else if (key == "mesh_format") {
      const std::string f = to_string_value(key, val);
      if (f == "off") cfg.mesh_format = MeshFormat::Off;
      else if (f == "msh") cfg.mesh_format = MeshFormat::Msh2;
      else if (f == "auto") cfg.mesh_format = MeshFormat::Auto;
      else throw ConfigError("config: mesh_format must be off/msh/auto");
    } else if (key == "geometry") {
      cfg.geometry = to_string_value(key, val);
    } else if (key == "geom_size") {
      cfg.geom_size = to_double(key, val);
    } else if (key == "geom_density") {
      cfg.geom_density = static_cast<int>(to_int(key, val));
    } else if (key == "frequency_hz") {
      cfg.frequency_hz = to_double(key, val);
    } else if (key == "sweep_start_hz") {
      cfg.sweep_start_hz = to_double(key, val);
    } else if (key == "sweep_stop_hz") {
      cfg.sweep_stop_hz = to_double(key, val);
    } else if (key == "sweep_step_hz") {
      cfg.sweep_step_hz = to_double(key, val);
    } else if (key == "backend") {
      const std::string b = to_string_value(key, val);
      if (b == "mlfma-ira") cfg.backend = Backend::MlfmaIra;
      else if (b == "dense-qz") cfg.backend = Backend::DenseQz;
      else throw ConfigError("config: backend must be mlfma-ira or dense-qz");
    } else if (key == "transform") {
      const std::string t = to_string_value(key, val);
      if (t == "sep1") cfg.transform = Transform::Sep1;
      else if (t == "sep") cfg.transform = Transform::Sep;
      else throw ConfigError("config: transform must be sep1 or sep");
    } else if (key == "nev") {
      cfg.nev = static_cast<int>(to_int(key, val));
    } else if (key == "ncv") {
      cfg.ncv = static_cast<int>(to_int(key, val));
    } else if (key == "outer_tol") {
      cfg.outer_tol = to_double(key, val);
    } else if (key == "max_outer") {
      cfg.max_outer = static_cast<int>(to_int(key, val));
    } else if (key == "seed") {
      cfg.seed = static_cast<uint64_t>(to_int(key, val));
    } else if (key == "inner_solver") {
      const std::string s = to_string_value(key, val);
      if (s == "gmres") cfg.inner_solver = InnerSolver::Gmres;
      else if (s == "bicgstab") cfg.inner_solver = InnerSolver::Bicgstab;
      else throw ConfigError("config: inner_solver must be gmres or bicgstab");
    } else if (key == "inner_tol") {
      cfg.inner_tol = to_double(key, val);
    } else if (key == "inner_restart") {
      cfg.inner_restart = static_cast<int>(to_int(key, val));
    } else if (key == "inner_maxit") {
      cfg.inner_maxit = static_cast<int>(to_int(key, val));
    } else if (key == "precond") {
      const std::string p = to_string_value(key, val);
      if (p == "sai") cfg.precond = Precond::Sai;
      else if (p == "none") cfg.precond = Precond::None;
      else throw ConfigError("config: precond must be sai or none");
    } else if (key == "sai_preset") {
      const std::string p = to_string_value(key, val);
      if (p == "plate") cfg.sai = sai_preset_plate();
      else if (p == "uav") cfg.sai = sai_preset_uav();
      else if (p == "dreamliner") cfg.sai = sai_preset_dreamliner();
      else throw ConfigError("config: sai_preset must be plate/uav/dreamliner");
    } else if (key == "sai_eps1") {
      cfg.sai.eps1 = to_double(key, val);
    } else if (key == "sai_eps2") {
      cfg.sai.eps2 = to_double(key, val);
    } else if (key == "sai_eps3") {
      cfg.sai.eps3 = to_double(key, val);
    } else if (key == "d0") {
      cfg.d0 = static_cast<int>(to_int(key, val));
    } else if (key == "target_box") {
      cfg.target_box = to_double(key, val);
    } else if (key == "dense_cap") {
      cfg.dense_cap = static_cast<int>(to_int(key, val));
    } else if (key == "output_dir") {
      cfg.output_dir = to_string_value(key, val);
    } else if (key == "write_vtk") {
      cfg.write_vtk = to_bool(key, val);
    } else if (key == "write_modes") {
      cfg.write_modes = to_bool(key, val);
    } else if (key == "tracked_modes") {
      cfg.tracked_modes = static_cast<int>(to_int(key, val));
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (mesh_path.empty() && geometry.empty())
    problems.push_back("one of 'mesh' or 'geometry' is required");
  if (!geometry.empty() && geometry != "plate" && geometry != "sphere")
    problems.push_back("geometry must be plate or sphere");
  if (!geometry.empty() && (geom_size <= 0.0 || geom_density < 1))
    problems.push_back("geometry requires geom_size > 0 and geom_density >= 1");
  if (is_sweep()) {
    if (!(sweep_start_hz > 0.0) || !(sweep_stop_hz >= sweep_start_hz))
      problems.push_back("sweep requires 0 < sweep_start_hz <= sweep_stop_hz");
  } else if (!(frequency_hz > 0.0)) {
    problems.push_back("frequency_hz > 0 (or a sweep) is required");
  }
  if (nev < 1) problems.push_back("nev >= 1");
  if (ncv <= nev) problems.push_back("ncv > nev");
  if (!(outer_tol > 0.0 && outer_tol < 1.0)) problems.push_back("outer_tol in (0,1)");
  if (max_outer < 1) problems.push_back("max_outer >= 1");
  if (!(inner_tol > 0.0 && inner_tol < 1.0)) problems.push_back("inner_tol in (0,1)");
  if (inner_restart < 1) problems.push_back("inner_restart >= 1");
  if (inner_maxit < 1) problems.push_back("inner_maxit >= 1");
  for (double e : {sai.eps1, sai.eps2, sai.eps3})
    if (!(e > 0.0 && e < 1.0)) {
      problems.push_back("SAI thresholds in (0,1)");
      break;
    }
  if (d0 < 1 || d0 > 12) problems.push_back("d0 in [1,12]");
  if (!(target_box >= 0.2 && target_box <= 0.5)) problems.push_back("target_box in [0.2,0.5]");
  if (dense_cap < 1) problems.push_back("dense_cap >= 1");
  if (tracked_modes < 1) problems.push_back("tracked_modes >= 1");
  if (output_dir.empty()) problems.push_back("output_dir nonempty");
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

}  // namespace cmfma
