#include "soqbt/gramians.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soqbt/errors.hpp"
#include "soqbt/parallel.hpp"

namespace soqbt {

namespace {

constexpr double kEigvecCondLimit = 1e12;
constexpr double kClampRatio = 1e-14;

// LU of phi(s), or of phi(s)^H when `adjoint` is set.
Eigen::PartialPivLU<CMatrix> factor_at_node(const SecondOrderSystem& sys, cplx s, long index,
                                            const char* side, bool adjoint = false) {
  const auto c = eval_coefficients(sys.damping(), s);
  const CMatrix phi = c.n * sys.M() + c.d * sys.K();
  Eigen::PartialPivLU<CMatrix> lu(adjoint ? CMatrix(phi.adjoint()) : phi);
  if (!(lu.rcond() >= 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << side << " node " << index << " (s = " << s << ") gives a singular pencil";
    throw SingularPencilError(os.str(), index);
  }
  return lu;
}

struct Eigendecomposition {
  CVector values;
  CMatrix vectors;
};

Eigendecomposition eigendecompose(const CMatrix& A, bool real) {
  Eigendecomposition out;
  if (real) {
    Eigen::EigenSolver<RMatrix> es(A.real(), true);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::IllConditionedEigenvectors, "eigenvalue iteration did not converge");
    }
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<CMatrix> es(A, true);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::IllConditionedEigenvectors, "eigenvalue iteration did not converge");
    }
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

CMatrix hermitian_part(const CMatrix& A, bool real) {
  CMatrix H = 0.5 * (A + A.adjoint());
  if (real) H = H.real().cast<cplx>();
  return H;
}

}  // namespace

QuadFactors quad_factors(const SecondOrderSystem& sys, const QuadratureRule& left,
                         const QuadratureRule& right) {
  left.check();
  right.check();
  const auto n = sys.n(), m = sys.m(), p = sys.p();
  QuadFactors out;
  out.Rp_check.resize(n, m * static_cast<Eigen::Index>(right.size()));
  out.Lv_check.resize(n, p * static_cast<Eigen::Index>(left.size()));

  parallel_for(right.size(), [&](std::size_t j) {
    const cplx s = right.node(j);
    const auto lu = factor_at_node(sys, s, static_cast<long>(j), "right");
    out.Rp_check.middleCols(static_cast<Eigen::Index>(j) * m, m) =
        right.weights[j] * lu.solve(sys.Bu());
  });
  parallel_for(left.size(), [&](std::size_t k) {
    const cplx s = left.node(k);
    const auto lu = factor_at_node(sys, s, static_cast<long>(k), "left", true);
    const CMatrix C = sys.Cp() + s * sys.Cv();
    // (w C phi^{-1})^H = w phi^{-H} C^H
    out.Lv_check.middleCols(static_cast<Eigen::Index>(k) * p, p) =
        left.weights[k] * lu.solve(C.adjoint());
  });
  return out;
}

CMatrix psd_factor(const CMatrix& G) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (G + G.adjoint()));
  RVector mu = es.eigenvalues();
  const double top = mu.maxCoeff();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    mu(i) = (top > 0.0 && mu(i) > kClampRatio * top) ? std::sqrt(mu(i)) : 0.0;
  }
  return es.eigenvectors() * mu.cast<cplx>().asDiagonal();
}

GramianFactors exact_gramians(const SecondOrderSystem& sys) {
  const CompanionForm fo = companion_form(sys);
  const bool real = sys.is_real() && sys.damping().is_conjugate_symmetric();
  const auto n = sys.n();

  const Eigen::PartialPivLU<CMatrix> E_lu(fo.E);
  const CMatrix At = E_lu.solve(fo.A);
  const CMatrix Bt = E_lu.solve(fo.B);

  const auto eig = eigendecompose(At, real);
  const CVector& lambda = eig.values;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda(i).real() < 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "companion pencil eigenvalue " << lambda(i) << " is not in the open left half-plane";
      throw Error(ErrorKind::UnstablePencil, os.str());
    }
  }
  const CMatrix& X = eig.vectors;
  const Eigen::PartialPivLU<CMatrix> X_lu(X);
  const double rc = X_lu.rcond();
  if (!(rc * kEigvecCondLimit >= 1.0)) {
    std::ostringstream os;
    os << "eigenvector matrix condition estimate " << 1.0 / rc << " exceeds 1e12";
    throw Error(ErrorKind::IllConditionedEigenvectors, os.str());
  }

  const auto N = lambda.size();
  // Controllability: A P + P A^H + B B^H = 0 in the eigenbasis.
  const CMatrix F = X_lu.solve(Bt);
  CMatrix P_hat = F * F.adjoint();
  // Observability: A^H Q + Q A + C^H C = 0 in the eigenbasis.
  const CMatrix H = fo.C * X;
  CMatrix Q_hat = H.adjoint() * H;
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) {
      P_hat(i, j) /= -(lambda(i) + std::conj(lambda(j)));
      Q_hat(i, j) /= -(std::conj(lambda(i)) + lambda(j));
    }
  }

  GramianFactors g;
  g.exact = true;
  g.P = hermitian_part(X * P_hat * X.adjoint(), real);
  // Q = E^{-H} X^{-H} Q_hat X^{-1} E^{-1}
  const CMatrix XinvEinv = X_lu.solve(E_lu.solve(CMatrix::Identity(2 * n, 2 * n)));
  g.Q = hermitian_part(XinvEinv.adjoint() * Q_hat * XinvEinv, real);
  g.R = psd_factor(g.P);
  g.L = psd_factor(g.Q);
  if (real) {
    g.R = g.R.real().cast<cplx>();
    g.L = g.L.real().cast<cplx>();
  }
  g.Rp = g.R.topRows(n);
  g.Lv = g.L.bottomRows(n);
  return g;
}

GramianFactors fine_quadrature_gramians(const SecondOrderSystem& sys,
                                        const FineQuadratureOptions& opts) {
  // Modal band from the undamped generalized eigenvalues of (K, M).
  const CMatrix MinvK = sys.M().partialPivLu().solve(sys.K());
  const Eigen::ComplexEigenSolver<CMatrix> es(MinvK, false);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = std::sqrt(std::abs(es.eigenvalues()(i)));
    if (w > 0.0) lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (!(hi > 0.0)) throw Error(ErrorKind::InvalidParams, "stiffness has no positive modes");
  lo *= std::pow(10.0, -opts.lower_decades);
  hi *= std::pow(10.0, opts.upper_decades);

  QuadratureRule rule = exp_trapezoid(lo, hi, opts.nodes);
  // Fold the uncovered band [0, lo] into the first pair.
  const double first_sq = rule.weights[0] * rule.weights[0] + lo / (2.0 * kPi);
  rule.weights[0] = rule.weights[1] = std::sqrt(first_sq);
  const QuadFactors qf = quad_factors(sys, rule.negated(Side::Left), rule);

  GramianFactors g;
  g.exact = false;
  g.Rp = psd_factor(qf.Rp_check * qf.Rp_check.adjoint());
  g.Lv = psd_factor(qf.Lv_check * qf.Lv_check.adjoint());
  return g;
}

GramianFactors gramian_factors(const SecondOrderSystem& sys) {
  try {
    return exact_gramians(sys);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnsupportedDamping ||
        e.kind() == ErrorKind::IllConditionedEigenvectors) {
      return fine_quadrature_gramians(sys);
    }
    throw;
  }
}

PvBlocks pv_blocks(const GramianFactors& g, const SecondOrderSystem& sys) {
  const auto n = sys.n();
  PvBlocks out;
  if (g.exact) {
    out.Pp = g.P.topLeftCorner(n, n);
    out.MQvM = sys.M().adjoint() * g.Q.bottomRightCorner(n, n) * sys.M();
  } else {
    out.Pp = g.Rp * g.Rp.adjoint();
    out.MQvM = sys.M().adjoint() * (g.Lv * g.Lv.adjoint()) * sys.M();
  }
  return out;
}

ResolventResiduals resolvent_identity_residuals(const CMatrix& X, const CMatrix& Y, cplx s,
                                                cplx z) {
  if (s == z) throw Error(ErrorKind::InvalidParams, "resolvent identities need s != z");
  const Eigen::PartialPivLU<CMatrix> Ls(s * X + Y);
  const Eigen::PartialPivLU<CMatrix> Lz(z * X + Y);
  const auto n = X.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix Rs = Ls.solve(I);
  const CMatrix Rz = Lz.solve(I);

  auto rel = [](const CMatrix& a, const CMatrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
  };
  ResolventResiduals out;
  out.first = rel(Ls.solve(X * Rz), (Rz - Rs) / (s - z));
  out.second = rel(Ls.solve(Y * Rz), (z * Rz - s * Rs) / (z - s));
  return out;
}

}  // namespace soqbt
