#pragma once

#include <complex>

#include <Eigen/Dense>

#include "starkloop/errors.hpp"

namespace starkloop {

using Complex = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat16 = Eigen::Matrix<Complex, 16, 16>;
using Vec16 = Eigen::Matrix<Complex, 16, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kImag{0.0, 1.0};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace starkloop
