// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <string>

#include "cmfma/octree.hpp"
#include "cmfma/rwg.hpp"

namespace cmfma {

struct AssemblyOptions {
  int far_order = 7;         // triangle rule for well-separated pairs
  int near_order = 16;       // rule for touching / near pairs
  double near_factor = 1.0;  // escalate when centroid distance < factor * (d1 + d2)
  int dense_cap = 5000;
};

/// Closed-form surface integrals of the static kernel over a triangle:
/// i0 = int 1/R dA', ivec = int (r' - proj(r))/R dA' (in-plane vector).
struct StaticPotentials {
  double i0;
  Vec3 ivec;
};
StaticPotentials static_potentials(const Vec3& v1, const Vec3& v2, const Vec3& v3, const Vec3& r);

/// Galerkin EFIE entry Z_ij with kernel e^{ikR}/R (4pi folded into the
/// excitation). Mixed-potential form; analytic 1/R extraction on touching
/// and near pairs. Arguments are canonicalized internally, so the result is
/// bitwise symmetric in (i, j).
cplx galerkin_entry(const RwgBasis& basis, int i, int j, double k,
                    const AssemblyOptions& opts = {});

/// Full N x N impedance matrix. Throws when N exceeds opts.dense_cap.
CMat assemble_dense(const RwgBasis& basis, double k, const AssemblyOptions& opts = {});

/// Sparse near-field block over the octree's near pairs. Entries coincide
/// bitwise with galerkin_entry / assemble_dense values.
using NearBlock = Eigen::SparseMatrix<cplx>;
NearBlock assemble_near(const RwgBasis& basis, const Octree& tree, double k,
                        const AssemblyOptions& opts = {});

// Binary dump/load (little-endian, documented in the README): header
// magic "CMZD"/"CMZN", u32 version, u32 N, f64 k, u32 far/near orders,
// then column-major complex doubles (dense) or CSC arrays (near).
void dump_dense(const CMat& z, double k, const AssemblyOptions& opts, const std::string& path);
CMat load_dense(const std::string& path, double* k_out = nullptr);
void dump_near(const NearBlock& z, double k, const AssemblyOptions& opts, const std::string& path);
NearBlock load_near(const std::string& path, double* k_out = nullptr);

}  // namespace cmfma
