#pragma once

#include <complex>

#include <Eigen/Dense>

namespace soqbt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Frobenius-norm relative difference ||a - b|| / max(||b||, tiny).
inline double rel_diff(const CMatrix& a, const CMatrix& b) {
  const double denom = b.norm();
  const double num = (a - b).norm();
  if (denom == 0.0) return num;
  return num / denom;
}

}  // namespace soqbt
