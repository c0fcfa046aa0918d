// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line with its measured quantities; the exit code is the failure count.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "cmfma/cm.hpp"
#include "cmfma/fmm.hpp"
#include "cmfma/meshgen.hpp"
#include "cmfma/pointtest.hpp"
#include "cmfma/runner.hpp"
#include "cmfma/sai.hpp"

using namespace cmfma;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("%s: criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", idx, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CVec random_cvec(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v;
}

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

// Shared 947-unknown plate state at 300 MHz, built once.
struct PlateState {
  SurfaceMesh mesh = make_plate(1.0, 0.6, 33, 10);
  RwgBasis basis{mesh};
  double k = wavenumber(300e6);
  CMat z;
  FmmEngine engine{basis, k};
  Eigen::SparseMatrix<cplx> sai;

  PlateState() {
    z = assemble_dense(basis, k);
    sai = build_sai(engine.near_block(), sai_preset_plate());
  }
};

SpectralOperator engine_operator(const FmmEngine& eng, const Eigen::SparseMatrix<cplx>* sai,
                                 double inner_tol) {
  SpectralOperator op;
  op.mode = SpectralMode::Sep1;
  op.apply_r = [&eng](const CVec& u) { return eng.matvec(FmmOperatorKind::R, u); };
  op.apply_m = [&eng](const CVec& u) { return eng.matvec(FmmOperatorKind::Z, u); };
  if (sai) op.precond = [sai](const CVec& u) { return CVec(*sai * u); };
  op.inner.tol = inner_tol;
  return op;
}

// ---- criterion 1: translator kernel decomposition -------------------------

void criterion_translators(const PlateState& ps) {
  const Octree& tree = ps.engine.tree();
  double worst = 0.0;
  int checked = 0;
  for (int l = 1; l <= tree.finest_level(); ++l) {
    std::set<std::array<int, 3>> offsets;
    for (ListMode mode : {ListMode::Standard, ListMode::AllTranslate})
      for (const auto& [obs, src] : tree.translation_pairs(l, mode)) {
        const auto& co = tree.level(l).boxes[obs].coords;
        const auto& cs = tree.level(l).boxes[src].coords;
        offsets.insert({co[0] - cs[0], co[1] - cs[1], co[2] - cs[2]});
      }
    if (offsets.empty()) continue;
    const double a = tree.box_size(l) / tree.wavelength();
    const int L = truncation_number(a, 3);
    const SphereQuadrature quad(L);
    for (const auto& off : offsets) {
      const Vec3 r_mm = tree.box_size(l) * Vec3(off[0], off[1], off[2]);
      const auto h = translator(Kernel::Helmholtz, L, ps.k, r_mm, quad);
      const auto c = translator(Kernel::Cos, L, ps.k, r_mm, quad);
      const auto s = translator(Kernel::Sin, L, ps.k, r_mm, quad);
      double hmax = 0.0, dmax = 0.0;
      for (size_t q = 0; q < h.size(); ++q) {
        hmax = std::max(hmax, std::abs(h[q]));
        dmax = std::max(dmax, std::abs(h[q] - (c[q] + cplx(0, 1) * s[q])));
      }
      worst = std::max(worst, dmax / hmax);
      ++checked;
    }
  }
  report(1, "translator decomposition", checked > 0 && worst < 1e-12,
         fmt("max pointwise |a_full - (a_cos + i a_sin)| / max|a_full| = %.3g over %d "
             "level/offset combinations (limit 1e-12)",
             worst, checked));
}

// ---- criterion 2: two-point plane-wave decomposition study ----------------

void criterion_point_test() {
  double sin_worst = 0.0;
  for (double a = 0.1; a <= 4.0 * 1.0001; a *= std::pow(40.0, 1.0 / 12.0)) {
    sin_worst = std::max(sin_worst, point_decomposition_error(Kernel::Sin, PointCase::Case1, a, 3));
    sin_worst = std::max(sin_worst, point_decomposition_error(Kernel::Sin, PointCase::Case2, a, 3));
  }
  double cos1_large = 0.0;
  for (double a : {1.0, 2.0, 4.0})
    cos1_large = std::max(cos1_large,
                          point_decomposition_error(Kernel::Cos, PointCase::Case1, a, 3));
  double cos1_small = 1e300;  // must be visibly degraded below half a wavelength
  for (double a : {0.1, 0.25, 0.5})
    cos1_small = std::min(cos1_small,
                          point_decomposition_error(Kernel::Cos, PointCase::Case1, a, 3));
  double cos2 = 1e300;
  for (double a : {0.5, 1.0, 2.0, 4.0})
    cos2 = std::min(cos2, point_decomposition_error(Kernel::Cos, PointCase::Case2, a, 3));
  const bool pass = sin_worst < 1e-3 && cos1_large < 1e-3 && cos1_small >= 1e-2 && cos2 >= 0.1;
  report(2, "two-point decomposition study", pass,
         fmt("sin max %.3g (<1e-3); cos case-1 max %.3g at a>=1 (<1e-3), min %.3g at a<=0.5 "
             "(>=1e-2); cos case-2 min %.3g (>=0.1)",
             sin_worst, cos1_large, cos1_small, cos2));
}

// ---- criterion 3: matvec oracle -------------------------------------------

void criterion_matvec(const PlateState& ps) {
  const RMat zr = ps.z.real(), zx = ps.z.imag();
  double ez = 0.0, er = 0.0, ex = 0.0;
  for (uint64_t s = 1; s <= 3; ++s) {
    const CVec u = random_cvec(ps.basis.size(), s);
    ez = std::max(ez, (ps.engine.matvec(FmmOperatorKind::Z, u) - ps.z * u).norm() /
                          (ps.z * u).norm());
    er = std::max(er,
                  (ps.engine.matvec(FmmOperatorKind::R, u) - zr * u).norm() / (zr * u).norm());
    ex = std::max(ex,
                  (ps.engine.matvec(FmmOperatorKind::X, u) - zx * u).norm() / (zx * u).norm());
  }
  report(3, "dense-vs-fast matvec", ez < 1e-3 && er < 1e-3 && ex < 1e-3,
         fmt("relative errors on 947-unknown plate: Z %.3g, R %.3g, X %.3g (limit 1e-3)", ez, er,
             ex));
}

// ---- criterion 4: sphere eigenvalue bands ----------------------------------

void criterion_sphere() {
  const double lambda0 = wavelength(300e6);
  const auto mesh = make_cube_sphere(0.75 * lambda0, 8);  // 1152 unknowns
  const RwgBasis basis(mesh);
  const double k = wavenumber(300e6);
  const FmmEngine eng(basis, k);
  const auto sai = build_sai(eng.near_block(), sai_preset_plate());
  SpectralOperator op = engine_operator(eng, &sai, 1e-3);
  EigsOptions eo;
  eo.nev = 10;
  eo.ncv = 30;
  const CmSolution fast = solve_cm(op, basis.size(), 300e6, eo);

  const CMat z = assemble_dense(basis, k);
  const CmSolution dense = dense_reference(z, 10, 300e6);

  bool pass = fast.modes.size() >= 8 && dense.modes.size() >= 8;
  double triple_lo = 1e300, triple_hi = -1e300, quint_lo = 1e300, quint_hi = -1e300;
  double ediff = 0.0;
  if (pass) {
    for (int m = 0; m < 3; ++m) {
      triple_lo = std::min(triple_lo, fast.modes[m].lambda);
      triple_hi = std::max(triple_hi, fast.modes[m].lambda);
    }
    for (int m = 3; m < 8; ++m) {
      quint_lo = std::min(quint_lo, fast.modes[m].lambda);
      quint_hi = std::max(quint_hi, fast.modes[m].lambda);
    }
    pass = pass && triple_lo >= -0.21 && triple_hi <= -0.19;
    pass = pass && quint_lo >= 0.30 && quint_hi <= 0.32;
    const double triple_spread = (triple_hi - triple_lo) / std::abs(0.5 * (triple_hi + triple_lo));
    const double quint_spread = (quint_hi - quint_lo) / std::abs(0.5 * (quint_hi + quint_lo));
    pass = pass && triple_spread <= 0.01 && quint_spread <= 0.01;
    for (int m = 0; m < 8; ++m)
      ediff = std::max(ediff, std::abs(fast.modes[m].lambda - dense.modes[m].lambda) /
                                  std::abs(dense.modes[m].lambda));
    pass = pass && ediff < 0.01;
    report(4, "sphere eigenvalue bands", pass,
           fmt("0.75-wavelength sphere, 1152 unknowns: triple [%.4f, %.4f] (band [-0.21,-0.19], "
               "spread %.2f%%), quintet [%.4f, %.4f] (band [0.30,0.32], spread %.2f%%), "
               "fast-vs-dense max %.3g (<1%%)",
               triple_lo, triple_hi, 100 * triple_spread, quint_lo, quint_hi, 100 * quint_spread,
               ediff));
  } else {
    report(4, "sphere eigenvalue bands", false, "solver returned fewer than 8 modes");
  }
}

// ---- criteria 5 & 6: plate mode agreement, realness, orthogonality --------

// RMS discrepancy of |J| between matched modes, worst over the first four.
double mode_magnitude_error(const CmSolution& ref, const CmSolution& other, const RMat& r) {
  double worst = 0.0;
  for (int m = 0; m < 4; ++m) {
    const CVec& jd = ref.modes[m].current;
    // Match by R-metric correlation; ordering can differ between backends.
    int best = 0;
    double bestc = -1.0;
    for (size_t o = 0; o < other.modes.size(); ++o) {
      const double c = std::abs((jd.transpose() * (r * other.modes[o].current).eval())(0, 0));
      if (c > bestc) {
        bestc = c;
        best = static_cast<int>(o);
      }
    }
    const CVec& jf = other.modes[best].current;
    worst = std::max(worst, (jf.cwiseAbs() - jd.cwiseAbs()).norm() / jd.norm());
  }
  return worst;
}

void criteria_plate_modes(const PlateState& ps) {
  const CmSolution dense = dense_reference(ps.z, 5, 300e6);
  EigsOptions eo;
  eo.nev = 5;
  eo.ncv = 20;
  SpectralOperator op3 = engine_operator(ps.engine, &ps.sai, 1e-3);
  const CmSolution fast3 = solve_cm(op3, ps.basis.size(), 300e6, eo);
  SpectralOperator op2 = engine_operator(ps.engine, &ps.sai, 1e-2);
  const CmSolution fast2 = solve_cm(op2, ps.basis.size(), 300e6, eo);

  const RMat r = ps.z.real();
  const double e3 = mode_magnitude_error(dense, fast3, r);
  const double e2 = mode_magnitude_error(dense, fast2, r);
  report(5, "plate mode agreement", e3 < 0.01 && e2 <= 0.05,
         fmt("J1..J4 magnitude RMS vs dense: %.3g%% at inner tol 1e-3 (<1%%), %.3g%% at 1e-2 "
             "(<=5%%)",
             100 * e3, 100 * e2));

  double realness = 0.0, cross = 0.0;
  for (const CmSolution* s : {&dense, &fast3}) {
    for (const auto& md : s->modes) realness = std::max(realness, md.realness);
    for (size_t m = 0; m < s->modes.size(); ++m) {
      const CVec rj = r * s->modes[m].current;
      for (size_t o = 0; o < m; ++o)
        cross = std::max(cross,
                         std::abs((s->modes[o].current.transpose() * rj).eval()(0, 0)));
    }
  }
  report(6, "realness and R-orthogonality", realness <= 1e-2 && cross <= 1e-2,
         fmt("max |Re(1/mu) - 1| = %.3g, max off-diagonal |Jm^T R Jn| = %.3g (limits 1e-2)",
             realness, cross));
}

// ---- criterion 7: SAI effectiveness ----------------------------------------

void criterion_sai(const PlateState& ps) {
  const MatVec op = [&ps](const CVec& u) { return ps.engine.matvec(FmmOperatorKind::Z, u); };
  const MatVec pc = [&ps](const CVec& u) { return CVec(ps.sai * u); };
  const CVec b = random_cvec(ps.basis.size(), 17);
  SolveOptions so;
  so.tol = 1e-3;
  SolveReport plain, precond;
  gmres(op, b, so, nullptr, &plain);
  gmres(op, b, so, &pc, &precond);
  const double ratio = double(precond.iterations) / double(plain.iterations);
  report(7, "SAI preconditioner effectiveness", precond.converged && ratio <= 0.5,
         fmt("GMRES iterations to 1e-3 on the plate: %d preconditioned vs %d plain, ratio %.3f "
             "(<=0.5)",
             precond.iterations, plain.iterations, ratio));
}

// ---- criterion 8: scaling law ----------------------------------------------

// One ~0.3 s timing window; returns the per-matvec average.
double fast_matvec_window(const FmmEngine& eng, const CVec& u, int reps) {
  const auto t0 = clk::now();
  for (int rep = 0; rep < reps; ++rep) (void)eng.matvec(FmmOperatorKind::Z, u);
  return seconds_since(t0) / reps;
}

int window_reps(const FmmEngine& eng, const CVec& u) {
  const auto tw = clk::now();
  (void)eng.matvec(FmmOperatorKind::Z, u);  // also warms translator caches
  return std::max(1, static_cast<int>(0.3 / std::max(1e-4, seconds_since(tw))));
}

// Dense matvec cost extrapolated from a fixed-size row block, so the largest
// case never materializes an N x N matrix.
double time_dense_matvec(int n) {
  const int rows = std::min(n, 2000);
  const CMat block = CMat::Random(rows, n);
  const CVec u = random_cvec(n, 29);
  CVec y = block * u;  // warm up
  const auto tw = clk::now();
  y.noalias() = block * u;
  const int reps = std::max(1, static_cast<int>(0.3 / std::max(1e-4, seconds_since(tw))));
  double best = 1e300;
  for (int batch = 0; batch < 3; ++batch) {
    const auto t0 = clk::now();
    for (int rep = 0; rep < reps; ++rep) y.noalias() = block * u;
    best = std::min(best, seconds_since(t0) / reps);
  }
  return best * (double(n) / rows);
}

void criterion_scaling() {
  const double lambda0 = wavelength(300e6);
  // Constant mesh density: radius grows linearly with the per-face division.
  const auto m1 = make_cube_sphere(0.0637 * 8 * lambda0, 8);      // ~1.2k unknowns
  const auto m3 = make_cube_sphere(0.0637 * 30 * lambda0, 30);    // ~16k
  const double k = wavenumber(300e6);
  const RwgBasis b1(m1), b3(m3);
  const int n1 = b1.size(), n3 = b3.size();
  const FmmEngine e1(b1, k), e3(b3, k);
  const CVec u1 = random_cvec(n1, 23), u3 = random_cvec(n3, 23);
  // Interleave the two measurements and keep per-size minima, so epochs of
  // machine-wide slowdown hit both sizes instead of skewing the ratio.
  const int r1 = window_reps(e1, u1), r3 = window_reps(e3, u3);
  double t1 = 1e300, t3 = 1e300;
  for (int round = 0; round < 5; ++round) {
    t1 = std::min(t1, fast_matvec_window(e1, u1, r1));
    t3 = std::min(t3, fast_matvec_window(e3, u3, r3));
  }
  const double fast_ratio = t3 / t1;
  // Bound stated at the nominal class sizes 1k/16k; the generated spheres
  // approximate them (the smallest case is still pre-asymptotic, with a
  // single translation level).
  const double bound = 1.5 * (16000.0 * std::log(16000.0)) / (1000.0 * std::log(1000.0));
  const double d1 = time_dense_matvec(n1);
  const double d3 = time_dense_matvec(n3);
  const double dense_ratio = d3 / d1;
  report(8, "matvec scaling", fast_ratio <= bound && dense_ratio >= 100.0,
         fmt("fast t(%d)/t(%d) = %.1f (bound %.1f); dense ratio = %.0f (>=100); "
             "per-matvec %.3fs -> %.3fs fast, %.4fs -> %.3fs dense",
             n3, n1, fast_ratio, bound, dense_ratio, t1, t3, d1, d3));
}

// ---- criterion 9: tracked frequency sweep ----------------------------------

void criterion_sweep() {
  RunConfig cfg;
  cfg.geometry = "plate";
  cfg.geom_size = 1.0;
  cfg.geom_density = 33;
  cfg.sweep_start_hz = 220e6;
  cfg.sweep_stop_hz = 380e6;
  cfg.sweep_step_hz = 20e6;
  cfg.nev = 6;
  cfg.ncv = 20;
  cfg.tracked_modes = 4;
  cfg.write_modes = false;
  cfg.output_dir = "acceptance_sweep_out";
  const RunResult rr = run(cfg);
  double cmin = 1.0;
  for (double c : rr.step_confidence) cmin = std::min(cmin, c);
  bool continuous = rr.points.size() == 9 && rr.curves.size() == 4;
  for (const auto& curve : rr.curves)
    for (double v : curve)
      if (!std::isfinite(v)) continuous = false;
  report(9, "tracked frequency sweep", rr.converged && continuous && cmin >= 0.9,
         fmt("plate 220-380 MHz, 9 points, 4 curves: min step confidence %.3f (>=0.9), "
             "all curve samples finite: %s",
             cmin, continuous ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto t0 = clk::now();
  std::printf("building shared plate state (947 unknowns, 300 MHz)...\n");
  PlateState ps;

  criterion_translators(ps);
  criterion_point_test();
  criterion_matvec(ps);
  criterion_sphere();
  criteria_plate_modes(ps);
  criterion_sai(ps);
  criterion_scaling();
  criterion_sweep();

  std::printf("%d of 9 criteria passed in %.0f s\n", 9 - g_failures, seconds_since(t0));
  return g_failures;
}
