// SPDX-License-Identifier: Apache-2.0
// Command-line driver. Links the C API only.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmfma.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct ConfigDeleter {
  void operator()(cmfma_config* c) const { cmfma_config_free(c); }
};
struct ResultDeleter {
  void operator()(cmfma_result* r) const { cmfma_result_free(r); }
};
using ConfigPtr = std::unique_ptr<cmfma_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<cmfma_result, ResultDeleter>;

int report(int code) {
  std::fprintf(stderr, "error: %s\n", cmfma_last_error());
  if (code == CMFMA_ENUMERIC) return kExitNumeric;
  return kExitUsage;
}

/// Build a config from an optional file plus `key=value` overrides. Values
/// that are not numbers or booleans are quoted automatically.
int build_config(const std::string& path, const std::vector<std::string>& sets, ConfigPtr& out) {
  cmfma_config* raw = nullptr;
  int rc = path.empty() ? cmfma_config_new(&raw) : cmfma_config_load(path.c_str(), &raw);
  if (rc != CMFMA_OK) return rc;
  out.reset(raw);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return CMFMA_EINVAL;
    }
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!val.empty() && val.front() == ' ') val.erase(0, 1);
    const bool bare = !val.empty() && (val == "true" || val == "false" ||
                                       val.find_first_not_of("0123456789+-.eE") == std::string::npos);
    const std::string quoted = bare ? val : "\"" + val + "\"";
    rc = cmfma_config_set(out.get(), key.c_str(), quoted.c_str());
    if (rc != CMFMA_OK) return rc;
  }
  return CMFMA_OK;
}

int run_solve_like(const std::string& config_path, const std::vector<std::string>& sets,
                   bool want_sweep) {
  ConfigPtr cfg;
  int rc = build_config(config_path, sets, cfg);
  if (rc != CMFMA_OK) return report(rc);
  cmfma_result* raw = nullptr;
  rc = cmfma_run(cfg.get(), &raw);
  ResultPtr res(raw);
  if (rc != CMFMA_OK && !res) return report(rc);

  int npts = 0;
  cmfma_result_num_points(res.get(), &npts);
  if (want_sweep && npts < 2) {
    std::fprintf(stderr, "error: sweep requires sweep_start_hz/stop/step in the config\n");
    return kExitUsage;
  }
  for (int p = 0; p < npts; ++p) {
    double f = 0.0;
    int nm = 0;
    cmfma_result_frequency(res.get(), p, &f);
    cmfma_result_num_modes(res.get(), p, &nm);
    std::printf("f = %.6g MHz\n", f / 1e6);
    for (int m = 0; m < nm; ++m) {
      double lam = 0.0, realness = 0.0, resid = 0.0;
      cmfma_result_mode(res.get(), p, m, &lam, &realness, &resid);
      std::printf("  mode %d: lambda = %+.6f  realness = %.2e  residual = %.2e\n", m, lam,
                  realness, resid);
    }
  }
  const char* json = nullptr;
  cmfma_result_summary(res.get(), &json);
  std::printf("%s\n", json);
  if (rc != CMFMA_OK) return report(rc);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic-mode analysis for PEC surface meshes"};
  app.require_subcommand(1);

  // point-test
  auto* pt = app.add_subcommand("point-test", "Plane-wave decomposition error sweep (CSV)");
  double a_min = 0.1, a_max = 4.0;
  int steps = 40, d0 = 3;
  std::vector<std::string> kernels{"helmholtz", "cos", "sin"};
  std::vector<int> cases{1, 2};
  std::string pt_out;
  pt->add_option("--a-min", a_min, "smallest box size in wavelengths");
  pt->add_option("--a-max", a_max, "largest box size in wavelengths");
  pt->add_option("--steps", steps, "number of sample points (log-spaced)");
  pt->add_option("--d0", d0, "digits of accuracy in the truncation formula");
  pt->add_option("--kernel", kernels, "kernels: helmholtz cos sin");
  pt->add_option("--case", cases, "cases: 1 2");
  pt->add_option("-o,--output", pt_out, "CSV path (default stdout)");

  // matvec-check
  auto* mc = app.add_subcommand("matvec-check", "Dense-vs-MLFMA matvec errors for Z, R, X");
  std::string mc_config;
  std::vector<std::string> mc_sets;
  int mc_vectors = 5;
  double mc_threshold = 1e-3;
  mc->add_option("-c,--config", mc_config, "config file");
  mc->add_option("--set", mc_sets, "override: key=value");
  mc->add_option("--vectors", mc_vectors, "number of random probe vectors");
  mc->add_option("--threshold", mc_threshold, "failure threshold on relative error");

  // solve / sweep
  auto* sv = app.add_subcommand("solve", "Solve characteristic modes at one frequency");
  std::string sv_config;
  std::vector<std::string> sv_sets;
  sv->add_option("-c,--config", sv_config, "config file");
  sv->add_option("--set", sv_sets, "override: key=value");
  auto* sw = app.add_subcommand("sweep", "Frequency sweep with mode tracking");
  std::string sw_config;
  std::vector<std::string> sw_sets;
  sw->add_option("-c,--config", sw_config, "config file");
  sw->add_option("--set", sw_sets, "override: key=value");

  // mesh-stats
  auto* ms = app.add_subcommand("mesh-stats", "Validate a mesh and print statistics");
  std::string ms_mesh, ms_format = "auto";
  ms->add_option("mesh", ms_mesh, "mesh file")->required();
  ms->add_option("--format", ms_format, "off | msh | auto");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (pt->parsed()) {
    if (kernels.empty() || cases.empty() || steps < 1 || !(a_min > 0.0) || !(a_max >= a_min)) {
      std::fprintf(stderr, "error: empty kernel/case list or bad range\n");
      return kExitUsage;
    }
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!pt_out.empty()) {
      file.open(pt_out);
      if (!file) {
        std::fprintf(stderr, "error: cannot write '%s'\n", pt_out.c_str());
        return kExitUsage;
      }
      out = &file;
    }
    (*out) << "a_over_lambda,kernel,case,relative_error\r\n";
    for (int s = 0; s < steps; ++s) {
      const double t = steps == 1 ? 0.0 : double(s) / (steps - 1);
      const double a = a_min * std::pow(a_max / a_min, t);
      for (const auto& kn : kernels)
        for (int c : cases) {
          double err = 0.0;
          const int rc = cmfma_point_test(kn.c_str(), c, a, d0, &err);
          if (rc != CMFMA_OK) return report(rc);
          char buf[128];
          std::snprintf(buf, sizeof buf, "%.6g,%s,%d,%.6e\r\n", a, kn.c_str(), c, err);
          (*out) << buf;
        }
    }
    return kExitOk;
  }

  if (mc->parsed()) {
    ConfigPtr cfg;
    int rc = build_config(mc_config, mc_sets, cfg);
    if (rc != CMFMA_OK) return report(rc);
    double ez = 0.0, er = 0.0, ex = 0.0;
    rc = cmfma_matvec_check(cfg.get(), mc_vectors, &ez, &er, &ex);
    if (rc != CMFMA_OK) return report(rc);
    std::printf("Z relative error: %.6e\nR relative error: %.6e\nX relative error: %.6e\n", ez, er,
                ex);
    if (ez > mc_threshold || er > mc_threshold || ex > mc_threshold) {
      std::fprintf(stderr, "error: matvec error exceeds threshold %.3g\n", mc_threshold);
      return kExitNumeric;
    }
    return kExitOk;
  }

  if (sv->parsed()) return run_solve_like(sv_config, sv_sets, false);
  if (sw->parsed()) return run_solve_like(sw_config, sw_sets, true);

  if (ms->parsed()) {
    char buf[1024];
    const int rc = cmfma_mesh_stats(ms_mesh.c_str(), ms_format.c_str(), buf, sizeof buf);
    if (rc != CMFMA_OK) return report(rc);
    std::printf("%s\n", buf);
    return kExitOk;
  }
  return kExitUsage;
}
