// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmfma/assembly.hpp"
#include "cmfma/octree.hpp"
#include "cmfma/spherequad.hpp"
#include "cmfma/translator.hpp"

namespace cmfma {

/// Local Lagrange interpolation of far-field signatures between two sphere
/// grids: tensor-product stencil in (theta, phi), periodic wrap in phi, pole
/// handling by theta-reflection f(-theta, phi) = f(theta, phi + pi), which is
/// exact for Cartesian signature components. The anterpolation is the exact
/// adjoint of the interpolation under the quadrature weights. Applied as the
/// separable two-pass factorization (phi pass shared by all theta rows, then
/// the theta pass with the pole reflection folded into a half-period rotation
/// of the even target phi grid), which costs O(stencil) per sample instead of
/// O(stencil^2) for the fused stencil it is algebraically identical to.
class SignatureInterp {
 public:
  SignatureInterp(const SphereQuadrature& from, const SphereQuadrature& to, int stencil = 4);

  /// Values sampled on the `from` grid -> `to` grid. Columns are independent.
  CMat apply(const CMat& x) const;
  /// Weighted adjoint: `to` grid -> `from` grid.
  CMat apply_adjoint(const CMat& y) const;

 private:
  Eigen::SparseMatrix<double> phi_;      // (nt_from * np_to) x n_from
  Eigen::SparseMatrix<double> theta_;    // n_to x (nt_from * np_to)
  Eigen::SparseMatrix<double> theta_a_;  // adjoint factors, weight-scaled
  Eigen::SparseMatrix<double> phi_a_;
};

/// Radiation signature of one basis function, referenced to its finest-box
/// center: V_s(khat) = int (I - khat khat) f(r) e^{ik khat.(r_c - r)} dA,
/// one row per quadrature direction, columns x/y/z. The receiving pattern is
/// the elementwise conjugate.
CMat radiation_signature(const RwgBasis& basis, const Octree& tree, const SphereQuadrature& quad,
                         double k, int n, int tri_order = 7);

struct FmmOptions {
  int digits = 3;          // d0 in the truncation formula
  double target_box = 0.25;  // finest box size / lambda, clamped to [0.2, 0.5]
  int stencil = 6;         // Lagrange points per dimension
  AssemblyOptions assembly{};
};

/// The three spectral operators served by the engine. Z pairs the full kernel
/// with standard interaction lists; X pairs the cos kernel with standard
/// lists; R pairs the sin kernel with all-translate lists (near sum over the
/// own box only). RStandard is the sin kernel on standard lists with the full
/// Re(near) block; it exists so that R + iX = Z can be checked exactly.
enum class FmmOperatorKind { Z, X, R, RStandard };

class FmmEngine {
 public:
  FmmEngine(const RwgBasis& basis, double k, FmmOptions opts = {});

  int size() const { return n_; }
  double k() const { return k_; }
  const Octree& tree() const { return tree_; }
  const NearBlock& near_block() const { return near_z_; }
  bool dense_fallback() const { return tree_.dense_fallback(); }
  const SphereQuadrature& level_quadrature(int l) const { return quads_.at(l); }

  CVec matvec(FmmOperatorKind op, const CVec& u) const;

  /// Far-field (translated) part only, for decomposition tests. Rejects the
  /// cos kernel on all-translate lists: the addition theorem fails there.
  CVec far_matvec(Kernel kernel, ListMode lists, const CVec& u) const;

  std::string stats_json() const;

 private:
  // Pair list sorted by observer with the translator of each pair resolved
  // to a pointer, so the translation loop carries no per-pair table lookups
  // and accumulates into each receive signature over a contiguous run.
  struct TransPlan {
    std::vector<std::pair<int, int>> pairs;  // (observer, source)
    std::vector<const cplx*> alphas;
  };

  const TranslatorTable& table_for(Kernel kernel, int level, ListMode lists) const;
  const TransPlan& plan_for(Kernel kernel, int level, ListMode lists) const;

  const RwgBasis* basis_;
  double k_;
  FmmOptions opts_;
  int n_;
  Octree tree_;
  NearBlock near_z_;       // full near block, complex
  NearBlock near_x_;       // Im of near block
  NearBlock near_r_std_;   // Re of near block
  NearBlock near_r_own_;   // Re restricted to same-finest-box pairs
  std::map<int, SphereQuadrature> quads_;        // level -> grid (levels 1..finest)
  std::map<int, SignatureInterp> interp_;        // key l: level l+1 grid -> level l grid
  std::vector<std::vector<CVec>> phase_up_;      // [l][child box]: shift to parent center
  std::vector<CMat> vs_;                         // per-basis finest signatures
  mutable std::map<std::pair<int, int>, TranslatorTable> tables_;  // (kernel+lists, level)
  mutable std::map<std::pair<int, int>, TransPlan> plans_;
  mutable bool warned_lowfreq_ = false;
};

}  // namespace cmfma
