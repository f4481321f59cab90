#include "soqbt/generators.hpp"

#include <random>

#include "soqbt/errors.hpp"

namespace soqbt {

SecondOrderSystem generate_msd_chain(int d, const MsdParams& params) {
  if (d < 1) throw Error(ErrorKind::InvalidParams, "msd chain needs d >= 1");
  if (!(params.row_mass > 0) || !(params.coupling_mass > 0) || !(params.row_stiffness > 0) ||
      !(params.coupling_stiffness > 0) || !(params.anchor_stiffness > 0)) {
    throw Error(ErrorKind::InvalidParams, "msd masses and stiffnesses must be positive");
  }
  const int n = 3 * d + 1;
  RMatrix M = RMatrix::Zero(n, n);
  RMatrix K = RMatrix::Zero(n, n);

  auto add_spring = [&K](int a, int b, double k) {
    K(a, a) += k;
    K(b, b) += k;
    K(a, b) -= k;
    K(b, a) -= k;
  };

  M(0, 0) = params.coupling_mass;
  K(0, 0) += params.anchor_stiffness;
  for (int row = 0; row < 3; ++row) {
    const int first = 1 + row * d;
    add_spring(0, first, params.coupling_stiffness);
    for (int i = 0; i < d; ++i) {
      M(first + i, first + i) = params.row_mass;
      if (i + 1 < d) add_spring(first + i, first + i + 1, params.row_stiffness);
    }
  }

  const CMatrix ones_col = CMatrix::Ones(n, 1);
  return SecondOrderSystem(M.cast<cplx>(), K.cast<cplx>(), Rayleigh{params.alpha, params.beta},
                           ones_col, CMatrix::Zero(1, n), ones_col.transpose());
}

SecondOrderSystem generate_random_spd_system(int n, int m, int p, std::uint64_t seed,
                                             bool symmetric) {
  if (n < 1 || m < 1 || p < 1) {
    throw Error(ErrorKind::InvalidParams, "random system needs n, m, p >= 1");
  }
  if (symmetric && m != p) {
    throw Error(ErrorKind::InvalidParams, "symmetric configuration requires m = p");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto gaussian = [&](int rows, int cols) {
    RMatrix X(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) X(i, j) = normal(rng);
    return X;
  };

  const RMatrix XM = gaussian(n, n);
  const RMatrix XK = gaussian(n, n);
  const RMatrix I = RMatrix::Identity(n, n);
  const RMatrix M = XM.transpose() * XM + n * I;
  const RMatrix K = XK.transpose() * XK + n * I;
  const double alpha = 0.05 + 0.45 * uniform(rng);
  const double beta = 0.01 + 0.09 * uniform(rng);

  RMatrix Bu, Cp, Cv;
  if (symmetric) {
    Bu = gaussian(n, m);
    Cp = Bu.transpose();
    Cv = RMatrix::Zero(p, n);
  } else {
    Bu = gaussian(n, m);
    Cp = gaussian(p, n);
    Cv = gaussian(p, n);
  }
  return SecondOrderSystem(M.cast<cplx>(), K.cast<cplx>(), Rayleigh{alpha, beta},
                           Bu.cast<cplx>(), Cp.cast<cplx>(), Cv.cast<cplx>());
}

SecondOrderSystem generate_structural_chain(int n, double eta) {
  if (n < 2) throw Error(ErrorKind::InvalidParams, "structural chain needs n >= 2");
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidParams, "eta must be nonnegative");
  CMatrix K = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 2.0;
    if (i + 1 < n) {
      K(i, i + 1) = -1.0;
      K(i + 1, i) = -1.0;
    }
  }
  CMatrix Bu = CMatrix::Zero(n, 1);
  Bu(0, 0) = 1.0;
  return SecondOrderSystem(CMatrix::Identity(n, n), K, Structural{eta}, Bu, Bu.transpose(),
                           CMatrix::Zero(1, n));
}

}  // namespace soqbt
