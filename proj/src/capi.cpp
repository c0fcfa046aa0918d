// SPDX-License-Identifier: Apache-2.0
#include "cmfma.h"

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cmfma/assembly.hpp"
#include "cmfma/config.hpp"
#include "cmfma/fmm.hpp"
#include "cmfma/pointtest.hpp"
#include "cmfma/runner.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

int classify(const std::exception& e) {
  const std::string what = e.what();
  if (what.find("cannot open") != std::string::npos || what.find("write") != std::string::npos)
    return CMFMA_EIO;
  return CMFMA_EINVAL;
}

}  // namespace

struct cmfma_config {
  // The accumulated config text is the source of truth; overrides append.
  // Parsing happens on every mutation so errors surface at set() time.
  std::string text;
  cmfma::RunConfig parsed;
};

struct cmfma_result {
  cmfma::RunResult run;
};

extern "C" {

const char* cmfma_last_error(void) { return g_last_error.c_str(); }

int cmfma_config_new(cmfma_config** out) {
  if (!out) return fail(CMFMA_EINVAL, "null output pointer");
  *out = new cmfma_config{};
  return CMFMA_OK;
}

int cmfma_config_parse(const char* text, cmfma_config** out) {
  if (!text || !out) return fail(CMFMA_EINVAL, "null argument");
  try {
    auto* cfg = new cmfma_config{text, cmfma::parse_config_text(text)};
    *out = cfg;
    return CMFMA_OK;
  } catch (const std::exception& e) {
    return fail(CMFMA_EINVAL, e.what());
  }
}

int cmfma_config_load(const char* path, cmfma_config** out) {
  if (!path || !out) return fail(CMFMA_EINVAL, "null argument");
  try {
    auto* cfg = new cmfma_config{};
    cfg->parsed = cmfma::load_config(path);
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg->text = ss.str();
    *out = cfg;
    return CMFMA_OK;
  } catch (const cmfma::ConfigError& e) {
    const std::string what = e.what();
    return fail(what.find("cannot open") != std::string::npos ? CMFMA_EIO : CMFMA_EINVAL, what);
  } catch (const std::exception& e) {
    return fail(CMFMA_EINVAL, e.what());
  }
}

int cmfma_config_set(cmfma_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(CMFMA_EINVAL, "null argument");
  const std::string line = std::string(key) + " = " + value + "\n";
  try {
    cfg->parsed = cmfma::parse_config_text(cfg->text + line);
    cfg->text += line;
    return CMFMA_OK;
  } catch (const std::exception& e) {
    return fail(CMFMA_EINVAL, e.what());
  }
}

void cmfma_config_free(cmfma_config* cfg) { delete cfg; }

int cmfma_run(const cmfma_config* cfg, cmfma_result** out) {
  if (!cfg || !out) return fail(CMFMA_EINVAL, "null argument");
  try {
    auto* r = new cmfma_result{cmfma::run(cfg->parsed)};
    *out = r;
    if (!r->run.converged) return fail(CMFMA_ENUMERIC, "solver did not fully converge");
    return CMFMA_OK;
  } catch (const std::exception& e) {
    return fail(classify(e), e.what());
  }
}

void cmfma_result_free(cmfma_result* r) { delete r; }

int cmfma_result_unknowns(const cmfma_result* r, int* n) {
  if (!r || !n) return fail(CMFMA_EINVAL, "null argument");
  *n = r->run.n;
  return CMFMA_OK;
}

int cmfma_result_num_points(const cmfma_result* r, int* num) {
  if (!r || !num) return fail(CMFMA_EINVAL, "null argument");
  *num = static_cast<int>(r->run.points.size());
  return CMFMA_OK;
}

int cmfma_result_frequency(const cmfma_result* r, int point, double* freq_hz) {
  if (!r || !freq_hz || point < 0 || point >= (int)r->run.points.size())
    return fail(CMFMA_EINVAL, "bad point index");
  *freq_hz = r->run.points[point].solution.freq_hz;
  return CMFMA_OK;
}

int cmfma_result_num_modes(const cmfma_result* r, int point, int* num) {
  if (!r || !num || point < 0 || point >= (int)r->run.points.size())
    return fail(CMFMA_EINVAL, "bad point index");
  *num = static_cast<int>(r->run.points[point].solution.modes.size());
  return CMFMA_OK;
}

int cmfma_result_mode(const cmfma_result* r, int point, int mode, double* lambda,
                      double* realness, double* residual) {
  if (!r || point < 0 || point >= (int)r->run.points.size())
    return fail(CMFMA_EINVAL, "bad point index");
  const auto& modes = r->run.points[point].solution.modes;
  if (mode < 0 || mode >= (int)modes.size()) return fail(CMFMA_EINVAL, "bad mode index");
  if (lambda) *lambda = modes[mode].lambda;
  if (realness) *realness = modes[mode].realness;
  if (residual) *residual = modes[mode].residual;
  return CMFMA_OK;
}

int cmfma_result_converged(const cmfma_result* r, int* flag) {
  if (!r || !flag) return fail(CMFMA_EINVAL, "null argument");
  *flag = r->run.converged ? 1 : 0;
  return CMFMA_OK;
}

int cmfma_result_min_confidence(const cmfma_result* r, double* confidence) {
  if (!r || !confidence) return fail(CMFMA_EINVAL, "null argument");
  double c = 1.0;
  for (double s : r->run.step_confidence) c = std::min(c, s);
  *confidence = c;
  return CMFMA_OK;
}

int cmfma_result_summary(const cmfma_result* r, const char** json) {
  if (!r || !json) return fail(CMFMA_EINVAL, "null argument");
  *json = r->run.summary_json.c_str();
  return CMFMA_OK;
}

int cmfma_point_test(const char* kernel, int pcase, double a_over_lambda, int d0,
                     double* rel_error) {
  if (!kernel || !rel_error) return fail(CMFMA_EINVAL, "null argument");
  if (pcase != 1 && pcase != 2) return fail(CMFMA_EINVAL, "pcase must be 1 or 2");
  if (!(a_over_lambda > 0.0)) return fail(CMFMA_EINVAL, "a_over_lambda must be positive");
  if (d0 < 1 || d0 > 12) return fail(CMFMA_EINVAL, "d0 must be in [1,12]");
  cmfma::Kernel k;
  const std::string ks = kernel;
  if (ks == "helmholtz") k = cmfma::Kernel::Helmholtz;
  else if (ks == "cos") k = cmfma::Kernel::Cos;
  else if (ks == "sin") k = cmfma::Kernel::Sin;
  else return fail(CMFMA_EINVAL, "kernel must be helmholtz/cos/sin");
  try {
    *rel_error = cmfma::point_decomposition_error(
        k, pcase == 1 ? cmfma::PointCase::Case1 : cmfma::PointCase::Case2, a_over_lambda, d0);
    return CMFMA_OK;
  } catch (const std::exception& e) {
    return fail(CMFMA_ENUMERIC, e.what());
  }
}

int cmfma_matvec_check(const cmfma_config* cfg, int num_vectors, double* max_err_z,
                       double* max_err_r, double* max_err_x) {
  if (!cfg || num_vectors < 1) return fail(CMFMA_EINVAL, "bad argument");
  try {
    const cmfma::RunConfig& rc = cfg->parsed;
    rc.validate();
    if (rc.is_sweep()) return fail(CMFMA_EINVAL, "matvec check needs a single frequency");
    const cmfma::SurfaceMesh mesh = cmfma::mesh_from_config(rc);
    mesh.validate();
    const cmfma::RwgBasis basis(mesh);
    const int n = basis.size();
    if (n > rc.dense_cap) return fail(CMFMA_EINVAL, "mesh exceeds dense_cap");
    const double k = cmfma::wavenumber(rc.frequency_hz);
    cmfma::AssemblyOptions ao;
    ao.dense_cap = rc.dense_cap;
    const cmfma::CMat z = cmfma::assemble_dense(basis, k, ao);
    const cmfma::RMat zr = z.real(), zx = z.imag();
    cmfma::FmmOptions fo;
    fo.digits = rc.d0;
    fo.target_box = rc.target_box;
    const cmfma::FmmEngine eng(basis, k, fo);

    std::mt19937_64 rng(rc.seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    double ez = 0.0, er = 0.0, ex = 0.0;
    for (int t = 0; t < num_vectors; ++t) {
      cmfma::CVec u(n);
      for (int i = 0; i < n; ++i) u[i] = cmfma::cplx(dist(rng), dist(rng));
      ez = std::max(ez, (eng.matvec(cmfma::FmmOperatorKind::Z, u) - z * u).norm() / (z * u).norm());
      er = std::max(er,
                    (eng.matvec(cmfma::FmmOperatorKind::R, u) - zr * u).norm() / (zr * u).norm());
      ex = std::max(ex,
                    (eng.matvec(cmfma::FmmOperatorKind::X, u) - zx * u).norm() / (zx * u).norm());
    }
    if (max_err_z) *max_err_z = ez;
    if (max_err_r) *max_err_r = er;
    if (max_err_x) *max_err_x = ex;
    return CMFMA_OK;
  } catch (const std::exception& e) {
    return fail(classify(e), e.what());
  }
}

int cmfma_mesh_stats(const char* path, const char* format, char* buf, size_t buflen) {
  if (!path || !buf || buflen == 0) return fail(CMFMA_EINVAL, "null argument");
  cmfma::MeshFormat fmt = cmfma::MeshFormat::Auto;
  if (format) {
    const std::string f = format;
    if (f == "off") fmt = cmfma::MeshFormat::Off;
    else if (f == "msh") fmt = cmfma::MeshFormat::Msh2;
    else if (f != "auto" && !f.empty()) return fail(CMFMA_EINVAL, "format must be off/msh/auto");
  }
  try {
    const cmfma::SurfaceMesh mesh = cmfma::load_mesh(path, fmt);
    mesh.validate();
    const auto s = mesh.stats();
    char tmp[512];
    std::snprintf(tmp, sizeof tmp,
                  "{\"vertices\": %d, \"triangles\": %d, \"edges\": %d, "
                  "\"interior_edges\": %d, \"edge_min\": %.9g, \"edge_mean\": %.9g, "
                  "\"edge_max\": %.9g, \"extent\": %.9g}",
                  s.num_vertices, s.num_triangles, s.num_edges, s.num_interior_edges, s.edge_min,
                  s.edge_mean, s.edge_max, s.extent);
    if (std::strlen(tmp) + 1 > buflen) return fail(CMFMA_EINVAL, "buffer too small");
    std::strcpy(buf, tmp);
    return CMFMA_OK;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    return fail(what.find("cannot open") != std::string::npos ? CMFMA_EIO : CMFMA_EINVAL, what);
  }
}

}  // extern "C"
