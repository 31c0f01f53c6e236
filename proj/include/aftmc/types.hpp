#pragma once

#include <complex>
#include <Eigen/Dense>

namespace aftmc {

using Real = double;
using Complex = std::complex<double>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr const char* kVersion = "0.1.0";

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace aftmc
