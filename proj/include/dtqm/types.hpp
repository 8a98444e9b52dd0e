#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace dtqm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Position, velocity or momentum. 1D quantities live in component 0 and
// leave component 1 at zero.
using Point = std::array<double, 2>;

// 2x2 block of second derivatives: Mat2[a][b] = d^2 S / dx_a dy_b.
using Mat2 = std::array<std::array<double, 2>, 2>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dtqm
