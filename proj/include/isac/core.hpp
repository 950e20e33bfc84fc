#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace isac {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Propagation speed used throughout the link-budget and delay math.
inline constexpr double speed_of_light = 3.0e8;  // m/s

inline constexpr double boltzmann_const = 1.38e-23;  // J/K

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace isac
