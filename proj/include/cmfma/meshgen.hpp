// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cmfma/mesh.hpp"

namespace cmfma {

/// Rectangular plate in the xy-plane, corner at the origin, structured
/// nx-by-ny grid of cells split into triangles. Interior-edge count (RWG
/// unknowns) is 3*nx*ny - nx - ny.
SurfaceMesh make_plate(double lx, double ly, int nx, int ny);

/// Unit-square two-triangle open mesh.
SurfaceMesh make_unit_square();

/// Regular tetrahedron surface with circumradius r.
SurfaceMesh make_tetrahedron(double r = 1.0);

/// Sphere of radius r from a gnomonic cube grid, p-by-p cells per face:
/// 12*p^2 triangles, 18*p^2 RWG unknowns. Carries the full cube symmetry,
/// which keeps discretized degenerate mode groups tight.
SurfaceMesh make_cube_sphere(double r, int p);

}  // namespace cmfma
