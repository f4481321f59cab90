#include "soqbt/system.hpp"

#include <sstream>

#include "soqbt/errors.hpp"

namespace soqbt {

namespace {

constexpr double kMassRcondFloor = 1e-14;
constexpr double kPencilRcondFloor = 1e-14;

std::string complex_str(cplx s) {
  std::ostringstream os;
  os.precision(17);
  os << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i";
  return os.str();
}

Eigen::PartialPivLU<CMatrix> factor_pencil(const CMatrix& phi, cplx s) {
  Eigen::PartialPivLU<CMatrix> lu(phi);
  const double rc = lu.rcond();
  if (!(rc >= kPencilRcondFloor)) {
    std::ostringstream os;
    os << "pencil phi(s) singular at s = " << complex_str(s) << " (rcond " << rc << ")";
    throw SingularPencilError(os.str());
  }
  return lu;
}

}  // namespace

SecondOrderSystem::SecondOrderSystem(CMatrix M, CMatrix K, DampingSpec damping, CMatrix Bu,
                                     CMatrix Cp, CMatrix Cv)
    : M_(std::move(M)),
      K_(std::move(K)),
      Bu_(std::move(Bu)),
      Cp_(std::move(Cp)),
      Cv_(std::move(Cv)),
      damping_(std::move(damping)) {
  const auto n = M_.rows();
  if (n < 1 || M_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "M must be square and nonempty");
  }
  if (K_.rows() != n || K_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "K must match M");
  }
  if (Bu_.rows() != n || Bu_.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "Bu must be n x m with m >= 1");
  }
  if (Cp_.cols() != n || Cp_.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "Cp must be p x n with p >= 1");
  }
  if (Cv_.cols() != n || Cv_.rows() != Cp_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "Cv must have the shape of Cp");
  }
  Eigen::PartialPivLU<CMatrix> lu(M_);
  const double rc = lu.rcond();
  if (!(rc >= kMassRcondFloor)) {
    std::ostringstream os;
    os << "mass matrix is singular (rcond " << rc << ")";
    throw Error(ErrorKind::InvalidParams, os.str());
  }
}

bool SecondOrderSystem::is_real() const {
  return M_.imag().isZero(0.0) && K_.imag().isZero(0.0) && Bu_.imag().isZero(0.0) &&
         Cp_.imag().isZero(0.0) && Cv_.imag().isZero(0.0);
}

SecondOrderSystem SecondOrderSystem::with_damping(DampingSpec damping) const {
  return SecondOrderSystem(M_, K_, std::move(damping), Bu_, Cp_, Cv_);
}

CMatrix eval_pencil(const SecondOrderSystem& sys, cplx s) {
  const auto c = eval_coefficients(sys.damping(), s);
  return c.n * sys.M() + c.d * sys.K();
}

TransferSample eval_sample(const SecondOrderSystem& sys, cplx s, bool with_split,
                           bool with_derivative) {
  const auto c = eval_coefficients(sys.damping(), s, with_derivative);
  const CMatrix phi = c.n * sys.M() + c.d * sys.K();
  const auto lu = factor_pencil(phi, s);
  const CMatrix X = lu.solve(sys.Bu());

  TransferSample out;
  out.node = s;
  const CMatrix Gp = sys.Cp() * X;
  const CMatrix Gv = s * (sys.Cv() * X);
  out.G = Gp + Gv;
  if (with_split) {
    out.Gp = Gp;
    out.Gv = Gv;
  }
  if (with_derivative) {
    const CMatrix dphi_X = *c.n_prime * (sys.M() * X) + *c.d_prime * (sys.K() * X);
    const CMatrix Y = lu.solve(dphi_X);
    out.G_prime = sys.Cv() * X - (s * sys.Cv() + sys.Cp()) * Y;
  }
  return out;
}

CMatrix eval_transfer(const SecondOrderSystem& sys, cplx s) {
  return eval_sample(sys, s, false, false).G;
}

std::pair<CMatrix, CMatrix> eval_transfer_split(const SecondOrderSystem& sys, cplx s) {
  auto smp = eval_sample(sys, s, true, false);
  return {std::move(*smp.Gp), std::move(*smp.Gv)};
}

CMatrix eval_transfer_derivative(const SecondOrderSystem& sys, cplx s) {
  return *eval_sample(sys, s, false, true).G_prime;
}

CMatrix damping_matrix(const SecondOrderSystem& sys) {
  const auto [f, g] = sys.damping().constant_coefficients();
  return f * sys.M() + g * sys.K();
}

CompanionForm companion_form(const SecondOrderSystem& sys) {
  const CMatrix D = damping_matrix(sys);
  const auto n = sys.n();
  CompanionForm fo;
  fo.E = CMatrix::Zero(2 * n, 2 * n);
  fo.E.topLeftCorner(n, n).setIdentity();
  fo.E.bottomRightCorner(n, n) = sys.M();
  fo.A = CMatrix::Zero(2 * n, 2 * n);
  fo.A.topRightCorner(n, n).setIdentity();
  fo.A.bottomLeftCorner(n, n) = -sys.K();
  fo.A.bottomRightCorner(n, n) = -D;
  fo.B = CMatrix::Zero(2 * n, sys.m());
  fo.B.bottomRows(n) = sys.Bu();
  fo.C.resize(sys.p(), 2 * n);
  fo.C << sys.Cp(), sys.Cv();
  return fo;
}

CMatrix first_order_transfer(const CompanionForm& fo, cplx s) {
  const CMatrix pencil = s * fo.E - fo.A;
  const auto lu = factor_pencil(pencil, s);
  return fo.C * lu.solve(fo.B);
}

}  // namespace soqbt
