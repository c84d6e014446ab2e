#pragma once

#include <complex>

#include <Eigen/Dense>

namespace jdpp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

/// Inner product linear in `a` and antilinear in `b`.
inline cplx inner(const Vector& a, const Vector& b) { return b.dot(a); }

}  // namespace jdpp
