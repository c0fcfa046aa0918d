// SPDX-License-Identifier: Apache-2.0
#include "cmfma/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cmfma/quadrature.hpp"

namespace cmfma {

SignatureInterp::SignatureInterp(const SphereQuadrature& from, const SphereQuadrature& to,
                                 int stencil) {
  if (stencil < 2) throw std::invalid_argument("SignatureInterp: stencil too small");
  const int ntf = from.n_theta(), npf = from.n_phi();
  if (stencil > ntf || stencil > npf)
    throw std::invalid_argument("SignatureInterp: stencil exceeds source grid");

  // Source colatitudes ascending, keeping the original theta-row index.
  std::vector<std::pair<double, int>> th(ntf);
  for (int i = 0; i < ntf; ++i)
    th[i] = {std::acos(std::clamp(from.cos_theta()[i], -1.0, 1.0)), i};
  std::sort(th.begin(), th.end());

  // Extended theta node e: reflection through the poles maps to the same
  // physical direction with phi advanced by half a period.
  struct ExtNode {
    double theta;
    int row;     // original theta-row index in the source grid
    bool shift;  // phi + pi
  };
  auto ext = [&](int e) -> ExtNode {
    if (e >= 0 && e < ntf) return {th[e].first, th[e].second, false};
    if (e < 0) return {-th[-1 - e].first, th[-1 - e].second, true};
    return {2.0 * kPi - th[2 * ntf - 1 - e].first, th[2 * ntf - 1 - e].second, true};
  };

  const int npt = to.n_phi(), ntt = to.n_theta();
  const double h = 2.0 * kPi / npf;

  // Phi pass: every source theta row onto the target phi grid. The stencil
  // for a target column is the same in each row, so the factor is a block
  // repetition of one periodic 1-D interpolant.
  std::vector<Eigen::Triplet<double>> ptrips;
  ptrips.reserve(static_cast<size_t>(ntf) * npt * stencil);
  for (int ip = 0; ip < npt; ++ip) {
    const double phi_t = to.phi(ip);
    // Phi stencil: consecutive uniform nodes, unwrapped around the target.
    const int jb = static_cast<int>(std::floor(phi_t / h));
    const int ps = jb - (stencil - 1) / 2;
    std::vector<double> lp(stencil, 1.0);
    for (int a = 0; a < stencil; ++a)
      for (int b = 0; b < stencil; ++b)
        if (b != a) lp[a] *= (phi_t - (ps + b) * h) / (double(a) - b) / h;
    for (int b = 0; b < stencil; ++b) {
      const int col_phi = ((ps + b) % npf + npf) % npf;
      for (int r = 0; r < ntf; ++r)
        ptrips.emplace_back(r * npt + ip, r * npf + col_phi, lp[b]);
    }
  }
  phi_.resize(ntf * npt, from.size());
  phi_.setFromTriplets(ptrips.begin(), ptrips.end());

  // Theta pass on the target phi grid. Reflected rows read phi + pi, an
  // exact half-period rotation: n_phi is even by construction.
  std::vector<Eigen::Triplet<double>> ttrips;
  ttrips.reserve(static_cast<size_t>(to.size()) * stencil);
  for (int it = 0; it < ntt; ++it) {
    const double theta_t = std::acos(std::clamp(to.cos_theta()[it], -1.0, 1.0));
    // Theta stencil: `stencil` consecutive extended nodes around theta_t.
    int j0 = static_cast<int>(std::lower_bound(th.begin(), th.end(),
                                               std::make_pair(theta_t, -1)) -
                              th.begin());
    const int s = j0 - stencil / 2;
    std::vector<ExtNode> tn(stencil);
    for (int a = 0; a < stencil; ++a) tn[a] = ext(s + a);

    std::vector<double> lt(stencil, 1.0);
    for (int a = 0; a < stencil; ++a)
      for (int b = 0; b < stencil; ++b)
        if (b != a) lt[a] *= (theta_t - tn[b].theta) / (tn[a].theta - tn[b].theta);

    for (int a = 0; a < stencil; ++a) {
      const int half = tn[a].shift ? npt / 2 : 0;
      for (int ip = 0; ip < npt; ++ip)
        ttrips.emplace_back(it * npt + ip, tn[a].row * npt + (ip + half) % npt, lt[a]);
    }
  }
  theta_.resize(to.size(), ntf * npt);
  theta_.setFromTriplets(ttrips.begin(), ttrips.end());

  // Anterpolation: adjoint under the two quadratures' weights, factored the
  // same way with the weights folded into the outer factors.
  std::vector<Eigen::Triplet<double>> tat, pat;
  tat.reserve(ttrips.size());
  for (const auto& t : ttrips)
    tat.emplace_back(t.col(), t.row(), t.value() * to.weights()[t.row()]);
  theta_a_.resize(ntf * npt, to.size());
  theta_a_.setFromTriplets(tat.begin(), tat.end());
  pat.reserve(ptrips.size());
  for (const auto& t : ptrips)
    pat.emplace_back(t.col(), t.row(), t.value() / from.weights()[t.col()]);
  phi_a_.resize(from.size(), ntf * npt);
  phi_a_.setFromTriplets(pat.begin(), pat.end());
}

CMat SignatureInterp::apply(const CMat& x) const {
  CMat out(theta_.rows(), x.cols());
  out.real() = theta_ * (phi_ * x.real()).eval();
  out.imag() = theta_ * (phi_ * x.imag()).eval();
  return out;
}

CMat SignatureInterp::apply_adjoint(const CMat& y) const {
  CMat out(phi_a_.rows(), y.cols());
  out.real() = phi_a_ * (theta_a_ * y.real()).eval();
  out.imag() = phi_a_ * (theta_a_ * y.imag()).eval();
  return out;
}

CMat radiation_signature(const RwgBasis& basis, const Octree& tree, const SphereQuadrature& quad,
                         double k, int n, int tri_order) {
  const SurfaceMesh& mesh = basis.mesh();
  const Vec3 rc = tree.box_center(tree.finest_level(), tree.box_of(n));
  const auto& rule = triangle_rule(tri_order);
  const RwgEdge& e = basis.edge(n);

  CMat v = CMat::Zero(quad.size(), 3);
  for (int t : {e.tri_plus, e.tri_minus}) {
    const auto& tri = mesh.triangles()[t];
    const Vec3 &v1 = mesh.vertices()[tri[0]], &v2 = mesh.vertices()[tri[1]],
               &v3 = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(t);
    for (const auto& qp : rule) {
      const Vec3 r = tri_point(qp, v1, v2, v3);
      const Vec3 f = basis.evaluate(n, t, r);
      const double w = qp.w * area;
      for (int q = 0; q < quad.size(); ++q) {
        const Vec3& d = quad.directions()[q];
        const Vec3 ft = f - d * d.dot(f);
        const cplx phase = w * std::exp(cplx(0.0, k * d.dot(rc - r)));
        v.row(q) += phase * ft.transpose();
      }
    }
  }
  return v;
}

FmmEngine::FmmEngine(const RwgBasis& basis, double k, FmmOptions opts)
    : basis_(&basis),
      k_(k),
      opts_(opts),
      n_(basis.size()),
      tree_(basis, k, opts.target_box),
      near_z_(assemble_near(basis, tree_, k, opts.assembly)) {
  // Split the near block into the Re/Im views the R and X operators need.
  std::vector<Eigen::Triplet<cplx>> tx, tr, town;
  for (int c = 0; c < near_z_.outerSize(); ++c)
    for (NearBlock::InnerIterator it(near_z_, c); it; ++it) {
      tx.emplace_back(it.row(), it.col(), cplx(it.value().imag(), 0.0));
      tr.emplace_back(it.row(), it.col(), cplx(it.value().real(), 0.0));
      if (tree_.box_of(static_cast<int>(it.row())) == tree_.box_of(static_cast<int>(it.col())))
        town.emplace_back(it.row(), it.col(), cplx(it.value().real(), 0.0));
    }
  near_x_.resize(n_, n_);
  near_x_.setFromTriplets(tx.begin(), tx.end());
  near_r_std_.resize(n_, n_);
  near_r_std_.setFromTriplets(tr.begin(), tr.end());
  near_r_own_.resize(n_, n_);
  near_r_own_.setFromTriplets(town.begin(), town.end());

  if (tree_.dense_fallback()) return;

  const int lf = tree_.finest_level();
  const double lambda = tree_.wavelength();
  for (int l = 1; l <= lf; ++l) {
    const int trunc = truncation_number(tree_.box_size(l) / lambda, opts_.digits);
    quads_.emplace(l, SphereQuadrature(trunc));
  }
  for (int l = 1; l < lf; ++l)
    interp_.emplace(l, SignatureInterp(quads_.at(l + 1), quads_.at(l), opts_.stencil));

  // Center-shift phases for the upward pass, on the parent level's grid.
  phase_up_.resize(lf + 1);
  for (int l = 1; l < lf; ++l) {
    const auto& qd = quads_.at(l);
    const auto& children = tree_.level(l + 1).boxes;
    phase_up_[l].resize(children.size());
    for (size_t c = 0; c < children.size(); ++c) {
      const Vec3 d = tree_.box_center(l, children[c].parent) -
                     tree_.box_center(l + 1, static_cast<int>(c));
      CVec ph(qd.size());
      for (int q = 0; q < qd.size(); ++q)
        ph[q] = std::exp(cplx(0.0, k_ * qd.directions()[q].dot(d)));
      phase_up_[l][c] = std::move(ph);
    }
  }

  vs_.reserve(n_);
  for (int i = 0; i < n_; ++i)
    vs_.push_back(radiation_signature(basis, tree_, quads_.at(lf), k_, i, opts_.assembly.far_order));
}

const TranslatorTable& FmmEngine::table_for(Kernel kernel, int level, ListMode lists) const {
  const std::pair<int, int> key{static_cast<int>(kernel) * 2 + static_cast<int>(lists), level};
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;

  std::set<std::array<int, 3>> offsets;
  const auto& boxes = tree_.level(level).boxes;
  for (const auto& [obs, src] : tree_.translation_pairs(level, lists)) {
    const auto &co = boxes[obs].coords, &cs = boxes[src].coords;
    offsets.insert({co[0] - cs[0], co[1] - cs[1], co[2] - cs[2]});
  }
  std::vector<std::array<int, 3>> offv(offsets.begin(), offsets.end());
  const auto& qd = quads_.at(level);
  return tables_
      .emplace(key, TranslatorTable(kernel, qd.truncation(), k_, tree_.box_size(level), offv, qd))
      .first->second;
}

const FmmEngine::TransPlan& FmmEngine::plan_for(Kernel kernel, int level, ListMode lists) const {
  const std::pair<int, int> key{static_cast<int>(kernel) * 2 + static_cast<int>(lists), level};
  auto it = plans_.find(key);
  if (it != plans_.end()) return it->second;

  const TranslatorTable& tab = table_for(kernel, level, lists);
  const auto& boxes = tree_.level(level).boxes;
  TransPlan plan;
  plan.pairs = tree_.translation_pairs(level, lists);
  std::sort(plan.pairs.begin(), plan.pairs.end());
  plan.alphas.reserve(plan.pairs.size());
  for (const auto& [obs, src] : plan.pairs) {
    const auto &co = boxes[obs].coords, &cs = boxes[src].coords;
    plan.alphas.push_back(tab.at({co[0] - cs[0], co[1] - cs[1], co[2] - cs[2]}).data());
  }
  return plans_.emplace(key, std::move(plan)).first->second;
}

CVec FmmEngine::far_matvec(Kernel kernel, ListMode lists, const CVec& u) const {
  if (u.size() != n_) throw std::invalid_argument("far_matvec: size mismatch");
  if (kernel == Kernel::Cos && lists == ListMode::AllTranslate)
    throw std::invalid_argument(
        "far_matvec: cos kernel on all-translate lists violates the addition theorem");

  CVec y = CVec::Zero(n_);
  const int coarsest = (lists == ListMode::Standard) ? 2 : 1;
  const int lf = tree_.finest_level();
  if (tree_.dense_fallback() || lf < coarsest) return y;

  if (kernel == Kernel::Cos && !warned_lowfreq_ &&
      tree_.box_size(lf) < 0.4 * tree_.wavelength()) {
    std::fprintf(stderr,
                 "warning: cos-kernel decomposition degrades for box sizes below 0.4 wavelengths "
                 "(finest box %.3f wavelengths)\n",
                 tree_.box_size(lf) / tree_.wavelength());
    warned_lowfreq_ = true;
  }

  // Upward: aggregate member signatures, then interpolate-and-shift to parents.
  std::vector<std::vector<CMat>> sig(lf + 1), recv(lf + 1);
  {
    const auto& boxes = tree_.level(lf).boxes;
    sig[lf].resize(boxes.size());
    const int nq = quads_.at(lf).size();
    for (size_t b = 0; b < boxes.size(); ++b) {
      CMat s = CMat::Zero(nq, 3);
      for (int j : boxes[b].members) s += u[j] * vs_[j];
      sig[lf][b] = std::move(s);
    }
  }
  for (int l = lf - 1; l >= coarsest; --l) {
    const auto& boxes = tree_.level(l).boxes;
    const auto& up = interp_.at(l);
    sig[l].resize(boxes.size());
    const int nq = quads_.at(l).size();
    for (size_t b = 0; b < boxes.size(); ++b) {
      CMat s = CMat::Zero(nq, 3);
      for (int ch : boxes[b].children) {
        CMat c = up.apply(sig[l + 1][ch]);
        c.array().colwise() *= phase_up_[l][ch].array();
        s += c;
      }
      sig[l][b] = std::move(s);
    }
  }

  // Translation at every level carrying pairs for these lists.
  for (int l = coarsest; l <= lf; ++l) {
    const TransPlan& plan = plan_for(kernel, l, lists);
    if (plan.pairs.empty()) continue;
    recv[l].resize(tree_.level(l).boxes.size());
    const int nq = quads_.at(l).size();
    for (size_t p = 0; p < plan.pairs.size(); ++p) {
      const auto& [obs, src] = plan.pairs[p];
      if (recv[l][obs].size() == 0) recv[l][obs] = CMat::Zero(nq, 3);
      recv[l][obs].array() +=
          sig[l][src].array().colwise() * Eigen::Map<const CVec>(plan.alphas[p], nq).array();
    }
  }

  // Downward: shift to child centers and anterpolate onto the finer grid.
  for (int l = coarsest; l < lf; ++l) {
    if (recv[l].empty()) continue;
    const auto& boxes = tree_.level(l).boxes;
    const auto& down = interp_.at(l);
    const int nqc = quads_.at(l + 1).size();
    if (recv[l + 1].empty()) recv[l + 1].resize(tree_.level(l + 1).boxes.size());
    CMat shifted(quads_.at(l).size(), 3);
    for (size_t b = 0; b < boxes.size(); ++b) {
      if (recv[l][b].size() == 0) continue;
      for (int ch : boxes[b].children) {
        shifted = recv[l][b].array().colwise() * phase_up_[l][ch].conjugate().array();
        if (recv[l + 1][ch].size() == 0) recv[l + 1][ch] = CMat::Zero(nqc, 3);
        recv[l + 1][ch] += down.apply_adjoint(shifted);
      }
    }
  }

  // Reception: weighted inner product against the conjugate signatures.
  if (!recv[lf].empty()) {
    const auto& qd = quads_.at(lf);
    const Eigen::Map<const RVec> w(qd.weights().data(), qd.size());
    const auto& boxes = tree_.level(lf).boxes;
    for (size_t b = 0; b < boxes.size(); ++b) {
      if (recv[lf][b].size() == 0) continue;
      CMat rw = recv[lf][b];
      rw.array().colwise() *= w.array();
      for (int j : boxes[b].members) y[j] = (vs_[j].conjugate().array() * rw.array()).sum();
    }
  }

  const double c = k_ * k_ * kFreeSpaceEta / (4.0 * kPi);
  cplx pref;
  switch (kernel) {
    case Kernel::Helmholtz: pref = cplx(-c, 0.0); break;
    case Kernel::Cos: pref = cplx(0.0, c); break;
    case Kernel::Sin: pref = cplx(0.0, -c); break;
  }
  return pref * y;
}

CVec FmmEngine::matvec(FmmOperatorKind op, const CVec& u) const {
  if (u.size() != n_) throw std::invalid_argument("matvec: size mismatch");
  switch (op) {
    case FmmOperatorKind::Z:
      return near_z_ * u + far_matvec(Kernel::Helmholtz, ListMode::Standard, u);
    case FmmOperatorKind::X:
      return near_x_ * u + far_matvec(Kernel::Cos, ListMode::Standard, u);
    case FmmOperatorKind::R:
      return near_r_own_ * u + far_matvec(Kernel::Sin, ListMode::AllTranslate, u);
    case FmmOperatorKind::RStandard:
      return near_r_std_ * u + far_matvec(Kernel::Sin, ListMode::Standard, u);
  }
  throw std::invalid_argument("matvec: unknown operator");
}

std::string FmmEngine::stats_json() const {
  std::ostringstream os;
  os << "{\"n\":" << n_ << ",\"near_nnz\":" << near_z_.nonZeros()
     << ",\"dense_fallback\":" << (tree_.dense_fallback() ? "true" : "false")
     << ",\"levels\":" << tree_.num_levels() << ",\"per_level\":[";
  bool first = true;
  for (const auto& [l, qd] : quads_) {
    os << (first ? "" : ",") << "{\"level\":" << l << ",\"truncation\":" << qd.truncation()
       << ",\"directions\":" << qd.size() << ",\"boxes\":" << tree_.level(l).boxes.size() << "}";
    first = false;
  }
  os << "]}";
  return os.str();
}

}  // namespace cmfma
