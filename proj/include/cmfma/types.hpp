// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cmfma {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kFreeSpaceEta = 376.730313668;      // ohm
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// k = 2*pi*f/c0 for a frequency in Hz.
inline double wavenumber(double freq_hz) { return 2.0 * kPi * freq_hz / kSpeedOfLight; }
inline double wavelength(double freq_hz) { return kSpeedOfLight / freq_hz; }

}  // namespace cmfma
