// Shared scalar/matrix aliases used across the library.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace adel {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr Cplx I_UNIT{0.0, 1.0};

} // namespace adel
