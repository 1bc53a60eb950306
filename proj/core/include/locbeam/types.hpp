// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace locbeam {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace locbeam
