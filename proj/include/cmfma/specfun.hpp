// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace cmfma {

/// Spherical Bessel functions j_0..j_lmax at x, downward (Miller) recurrence.
std::vector<double> sph_bessel_j(int lmax, double x);

/// Spherical Neumann functions y_0..y_lmax at x, upward recurrence.
/// Throws on overflow (extreme small arguments at high order).
std::vector<double> sph_neumann_y(int lmax, double x);

/// First-kind spherical Hankel h_l^(1) = j_l + i y_l for l = 0..lmax.
std::vector<std::complex<double>> sph_hankel1(int lmax, double x);

/// Legendre polynomials P_0..P_lmax at x in [-1, 1], three-term recurrence.
std::vector<double> legendre_p(int lmax, double x);

}  // namespace cmfma
