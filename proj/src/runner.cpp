// SPDX-License-Identifier: Apache-2.0
#include "cmfma/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>

#include <nlohmann/json.hpp>

#include "cmfma/assembly.hpp"
#include "cmfma/fmm.hpp"
#include "cmfma/meshgen.hpp"

namespace cmfma {

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> frequency_grid(const RunConfig& cfg) {
  if (!cfg.is_sweep()) return {cfg.frequency_hz};
  std::vector<double> fs;
  // Half-step slack so stop lands on the grid despite rounding.
  for (double f = cfg.sweep_start_hz; f <= cfg.sweep_stop_hz + 0.5 * cfg.sweep_step_hz;
       f += cfg.sweep_step_hz)
    fs.push_back(f);
  return fs;
}

FrequencyResult solve_point(const RunConfig& cfg, const RwgBasis& basis, double freq,
                            MatVec* apply_r_out) {
  FrequencyResult out;
  const double k = wavenumber(freq);
  const int n = basis.size();
  const auto t0 = clock_type::now();

  if (cfg.backend == Backend::DenseQz) {
    AssemblyOptions ao;
    ao.dense_cap = cfg.dense_cap;
    const CMat z = assemble_dense(basis, k, ao);
    out.setup_seconds = seconds_since(t0);
    const auto t1 = clock_type::now();
    out.solution = dense_reference(z, std::min(cfg.nev, n - 1), freq);
    out.solve_seconds = seconds_since(t1);
    out.levels = 1;
    if (apply_r_out) {
      const auto zr = std::make_shared<RMat>(z.real());
      *apply_r_out = [zr](const CVec& u) { return CVec(*zr * u); };
    }
    return out;
  }

  FmmOptions fo;
  fo.digits = cfg.d0;
  fo.target_box = cfg.target_box;
  auto eng = std::make_shared<FmmEngine>(basis, k, fo);
  std::shared_ptr<Eigen::SparseMatrix<cplx>> sai;
  if (cfg.precond == Precond::Sai) sai = std::make_shared<Eigen::SparseMatrix<cplx>>(
      build_sai(eng->near_block(), cfg.sai));
  out.setup_seconds = seconds_since(t0);

  SpectralOperator op;
  op.mode = cfg.transform == Transform::Sep1 ? SpectralMode::Sep1 : SpectralMode::Sep;
  op.apply_r = [eng](const CVec& u) { return eng->matvec(FmmOperatorKind::R, u); };
  // Sep solves with the classical reactance, the negative of the
  // e^{+ikR}-kernel imaginary part served by the engine's X operator.
  op.apply_m = op.mode == SpectralMode::Sep1
                   ? MatVec([eng](const CVec& u) { return eng->matvec(FmmOperatorKind::Z, u); })
                   : MatVec([eng](const CVec& u) { return CVec(-eng->matvec(FmmOperatorKind::X, u)); });
  // SAI targets Z; the sep transform solves with X, which it does not model.
  if (sai && op.mode == SpectralMode::Sep1)
    op.precond = [sai](const CVec& u) { return CVec(*sai * u); };
  op.use_bicgstab = cfg.inner_solver == InnerSolver::Bicgstab;
  op.inner.tol = cfg.inner_tol;
  op.inner.restart = cfg.inner_restart;
  op.inner.maxit = cfg.inner_maxit;

  EigsOptions eo;
  eo.nev = cfg.nev;
  eo.ncv = std::min(cfg.ncv, n);
  eo.tol = cfg.outer_tol;
  eo.max_outer = cfg.max_outer;
  eo.seed = cfg.seed;

  const auto t1 = clock_type::now();
  out.solution = solve_cm(op, n, freq, eo);
  out.solve_seconds = seconds_since(t1);
  out.levels = eng->tree().num_levels();
  if (apply_r_out) *apply_r_out = op.apply_r;
  return out;
}

void write_eigenvalue_csv(const std::string& path, const RunResult& rr) {
  std::ofstream f(path);
  f << "frequency_hz,mode,lambda,abs_mu,realness,residual,outer_iterations,inner_iterations\r\n";
  char buf[256];
  for (const auto& pt : rr.points) {
    const CmSolution& s = pt.solution;
    for (size_t m = 0; m < s.modes.size(); ++m) {
      const CmMode& md = s.modes[m];
      std::snprintf(buf, sizeof buf, "%.10g,%zu,%.12g,%.12g,%.6g,%.6g,%d,%ld\r\n", s.freq_hz, m,
                    md.lambda, std::abs(md.mu), md.realness, md.residual, s.outer_iterations,
                    s.inner_iterations);
      f << buf;
    }
  }
}

void write_tracked_csv(const std::string& path, const RunResult& rr) {
  std::ofstream f(path);
  f << "frequency_hz,curve,lambda,step_confidence\r\n";
  char buf[160];
  for (size_t p = 0; p < rr.points.size(); ++p) {
    const double conf = p == 0 ? 1.0 : rr.step_confidence[p - 1];
    for (size_t c = 0; c < rr.curves.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.10g,%zu,%.12g,%.6g\r\n", rr.points[p].solution.freq_hz, c,
                    rr.curves[c][p], conf);
      f << buf;
    }
  }
}

void write_modes_json(const std::string& path, const CmSolution& s) {
  json j;
  j["frequency_hz"] = s.freq_hz;
  j["modes"] = json::array();
  for (size_t m = 0; m < s.modes.size(); ++m) {
    const CmMode& md = s.modes[m];
    json e;
    e["index"] = m;
    e["lambda"] = md.lambda;
    e["mu"] = {md.mu.real(), md.mu.imag()};
    e["realness"] = md.realness;
    e["residual"] = md.residual;
    e["normalized"] = md.normalized;
    json coeffs = json::array();
    for (int i = 0; i < md.current.size(); ++i)
      coeffs.push_back({md.current[i].real(), md.current[i].imag()});
    e["coefficients"] = std::move(coeffs);
    j["modes"].push_back(std::move(e));
  }
  std::ofstream(path) << j.dump(1) << "\n";
}

void write_vtk(const std::string& path, const RwgBasis& basis,
               const CmSolution& s) {
  const SurfaceMesh& mesh = basis.mesh();
  std::ofstream f(path);
  f << "# vtk DataFile Version 3.0\ncharacteristic mode current magnitudes\nASCII\n";
  f << "DATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << mesh.num_vertices() << " double\n";
  char buf[160];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    f << buf;
  }
  f << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles()) f << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  f << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) f << "5\n";
  f << "CELL_DATA " << mesh.num_triangles() << "\n";
  for (size_t m = 0; m < s.modes.size(); ++m) {
    const RVec mag = triangle_current_magnitude(basis, s.modes[m].current);
    f << "SCALARS mode_" << m << "_current_mag double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mag.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.9g\n", mag[t]);
      f << buf;
    }
  }
}

}  // namespace

SurfaceMesh mesh_from_config(const RunConfig& cfg) {
  if (!cfg.geometry.empty()) {
    if (cfg.geometry == "plate") {
      // Study plate aspect: ly = 0.6 lx, ny ~ 0.3 nx (947 unknowns at nx=33).
      const int ny = std::max(1, (int)std::lround(0.3 * cfg.geom_density));
      return make_plate(cfg.geom_size, 0.6 * cfg.geom_size, cfg.geom_density, ny);
    }
    return make_cube_sphere(cfg.geom_size, cfg.geom_density);
  }
  return load_mesh(cfg.mesh_path, cfg.mesh_format);
}

RVec triangle_current_magnitude(const RwgBasis& basis, const CVec& j) {
  const SurfaceMesh& mesh = basis.mesh();
  RVec mag(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec3 c = mesh.triangle_center(t);
    Eigen::Vector3cd cur = Eigen::Vector3cd::Zero();
    for (int b : basis.bases_on_triangle()[t]) cur += j[b] * basis.evaluate(b, t, c).cast<cplx>();
    mag[t] = std::sqrt(cur.squaredNorm());
  }
  return mag;
}

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  const SurfaceMesh mesh = mesh_from_config(cfg);
  mesh.validate();
  const RwgBasis basis(mesh);
  RunResult rr;
  rr.n = basis.size();

  std::filesystem::create_directories(cfg.output_dir);
  const auto fs = frequency_grid(cfg);

  std::vector<MatVec> apply_rs(fs.size());
  for (size_t p = 0; p < fs.size(); ++p)
    rr.points.push_back(solve_point(cfg, basis, fs[p], &apply_rs[p]));

  for (const auto& pt : rr.points) {
    if (pt.solution.outer_iterations >= cfg.max_outer && cfg.backend == Backend::MlfmaIra)
      rr.converged = false;
    for (const auto& m : pt.solution.modes)
      if (!m.normalized) rr.converged = false;
  }

  // Tracked curves across the sweep: follow the first `tracked_modes` modes
  // of the first point through each step's correlation matching.
  const int ntrack = std::min<int>(cfg.tracked_modes, (int)rr.points[0].solution.modes.size());
  rr.curves.assign(ntrack, std::vector<double>(fs.size(), 0.0));
  std::vector<int> where(ntrack);
  for (int c = 0; c < ntrack; ++c) {
    where[c] = c;
    rr.curves[c][0] = rr.points[0].solution.modes[c].lambda;
  }
  for (size_t p = 1; p < fs.size(); ++p) {
    // Correlate in the R metric of the later frequency.
    const TrackResult tr =
        track_modes(rr.points[p - 1].solution, rr.points[p].solution, apply_rs[p]);
    // Confidence over the tracked curves only: modes at the edge of the nev
    // window legitimately enter/leave between points and would otherwise
    // poison the metric.
    double conf = 1.0;
    for (int c = 0; c < ntrack; ++c)
      if (where[c] >= 0) conf = std::min(conf, tr.pair_confidence[where[c]]);
    rr.step_confidence.push_back(conf);
    for (int c = 0; c < ntrack; ++c) {
      where[c] = where[c] >= 0 ? tr.perm[where[c]] : -1;
      rr.curves[c][p] = where[c] >= 0 ? rr.points[p].solution.modes[where[c]].lambda
                                      : std::numeric_limits<double>::quiet_NaN();
    }
  }

  const std::filesystem::path dir(cfg.output_dir);
  write_eigenvalue_csv((dir / "eigenvalues.csv").string(), rr);
  if (cfg.is_sweep()) write_tracked_csv((dir / "tracked.csv").string(), rr);
  for (size_t p = 0; p < fs.size(); ++p) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "point_%03zu", p);
    if (cfg.write_modes)
      write_modes_json((dir / (std::string(tag) + "_modes.json")).string(), rr.points[p].solution);
    if (cfg.write_vtk)
      write_vtk((dir / (std::string(tag) + "_current.vtk")).string(), basis, rr.points[p].solution);
  }

  json summary;
  summary["n"] = rr.n;
  summary["backend"] = cfg.backend == Backend::DenseQz ? "dense-qz" : "mlfma-ira";
  summary["transform"] = cfg.transform == Transform::Sep1 ? "sep1" : "sep";
  summary["nev"] = cfg.nev;
  summary["ncv"] = cfg.ncv;
  summary["nlv"] = rr.points[0].levels;
  summary["seed"] = cfg.seed;
  summary["inner_tol"] = cfg.inner_tol;
  summary["d0"] = cfg.d0;
  summary["converged"] = rr.converged;
  long nii_total = 0;
  json pts = json::array();
  for (const auto& pt : rr.points) {
    json e;
    e["frequency_hz"] = pt.solution.freq_hz;
    e["outer_iterations"] = pt.solution.outer_iterations;
    e["inner_iterations"] = pt.solution.inner_iterations;
    e["setup_seconds"] = pt.setup_seconds;
    e["solve_seconds"] = pt.solve_seconds;
    nii_total += pt.solution.inner_iterations;
    pts.push_back(std::move(e));
  }
  summary["points"] = std::move(pts);
  summary["nii"] = nii_total;
  if (!rr.step_confidence.empty()) {
    double cmin = 1.0;
    for (double c : rr.step_confidence) cmin = std::min(cmin, c);
    summary["min_step_confidence"] = cmin;
  }
  rr.summary_json = summary.dump(1);
  std::ofstream((dir / "summary.json").string()) << rr.summary_json << "\n";
  return rr;
}

}  // namespace cmfma
