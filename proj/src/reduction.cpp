#include "soqbt/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soqbt/errors.hpp"

namespace soqbt {

namespace {

constexpr double kMarginalTol = 1e-11;

struct Svd {
  RVector s;
  CMatrix U, V;
};

Svd thin_svd(const CMatrix& A) {
  Svd out;
  if (A.imag().isZero(0.0)) {
    Eigen::BDCSVD<RMatrix> svd(A.real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.s = svd.singularValues();
    out.U = svd.matrixU().cast<cplx>();
    out.V = svd.matrixV().cast<cplx>();
  } else {
    Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.s = svd.singularValues();
    out.U = svd.matrixU();
    out.V = svd.matrixV();
  }
  return out;
}

// Rotates each of the first r singular pairs so the largest-magnitude entry
// of the left vector is real positive.
void fix_phases(Svd& svd, Eigen::Index r) {
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index idx = 0;
    svd.U.col(i).cwiseAbs().maxCoeff(&idx);
    const cplx u = svd.U(idx, i);
    if (std::abs(u) == 0.0) continue;
    const cplx phase = std::conj(u) / std::abs(u);
    svd.U.col(i) *= phase;
    svd.V.col(i) *= phase;
  }
}

TruncationReport make_report(const RVector& s, Eigen::Index r) {
  TruncationReport rep;
  rep.singular_values.assign(s.data(), s.data() + s.size());
  rep.r_used = r;
  rep.discarded_mass = (r < s.size() && s(0) > 0.0) ? s(r) / s(0) : 0.0;
  return rep;
}

void check_order(const RVector& s, Eigen::Index r, Eigen::Index rows, Eigen::Index cols) {
  if (r < 1) throw Error(ErrorKind::InvalidParams, "reduced order must be at least 1");
  if (r > std::min(rows, cols)) {
    std::ostringstream os;
    os << "order " << r << " exceeds the matrix dimensions " << rows << " x " << cols;
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (!(s(0) > 0.0) || !(s(r - 1) >= kRankTol * s(0))) {
    std::ostringstream os;
    os.precision(3);
    os << "sigma_" << r << " / sigma_1 = " << (s(0) > 0.0 ? s(r - 1) / s(0) : 0.0)
       << " is below " << kRankTol;
    throw Error(ErrorKind::RankDeficient, os.str());
  }
}

Eigen::Index numerical_rank(const RVector& s) {
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  Eigen::Index k = 0;
  while (k < s.size() && s(k) >= kRankTol * s(0)) ++k;
  return k;
}

}  // namespace

void ReducedSecondOrderModel::check() const {
  const auto n = Kt.rows();
  if (n < 1 || Kt.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Kt must be square");
  if (Dt && (Dt->rows() != n || Dt->cols() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "Dt must match Kt");
  }
  if (But.rows() != n || But.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "But must be r x m");
  }
  if (Cpt.cols() != n || Cpt.rows() < 1 || Cvt.cols() != n || Cvt.rows() != Cpt.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "Cpt and Cvt must be p x r");
  }
}

ReductionResult soquadpvbt(const LoewnerDataSet& ds, Eigen::Index r, const DampingSpec& damping) {
  if (ds.Kq.rows() != ds.Mq.rows() || ds.Kq.cols() != ds.Mq.cols() ||
      ds.Bq.rows() != ds.Mq.rows() || ds.Cpq.cols() != ds.Mq.cols() ||
      ds.Cvq.cols() != ds.Mq.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent data matrices");
  }
  Svd svd = thin_svd(ds.Mq);
  check_order(svd.s, r, ds.Mq.rows(), ds.Mq.cols());
  fix_phases(svd, r);

  const RVector is = svd.s.head(r).cwiseSqrt().cwiseInverse();
  const CMatrix U1s = svd.U.leftCols(r) * is.cast<cplx>().asDiagonal();  // U1 S1^{-1/2}
  const CMatrix Y1s = svd.V.leftCols(r) * is.cast<cplx>().asDiagonal();  // Y1 S1^{-1/2}

  ReductionResult out;
  auto& rom = out.rom;
  rom.damping = damping;
  rom.Kt = U1s.adjoint() * ds.Kq * Y1s;
  rom.But = U1s.adjoint() * ds.Bq;
  rom.Cpt = ds.Cpq * Y1s;
  rom.Cvt = ds.Cvq * Y1s;
  out.report = make_report(svd.s, r);
  return out;
}

ReductionResult sopvbt_from_factors(const SecondOrderSystem& sys, const CMatrix& Rp,
                                    const CMatrix& Lv, Eigen::Index r, bool proportional) {
  if (Rp.rows() != sys.n() || Lv.rows() != sys.n()) {
    throw Error(ErrorKind::DimensionMismatch, "factors must have n rows");
  }
  const CMatrix H = Lv.adjoint() * sys.M() * Rp;
  Svd svd = thin_svd(H);
  check_order(svd.s, r, H.rows(), H.cols());
  fix_phases(svd, r);

  const RVector is = svd.s.head(r).cwiseSqrt().cwiseInverse();
  const CMatrix W = Lv * svd.U.leftCols(r) * is.cast<cplx>().asDiagonal();
  const CMatrix T = Rp * svd.V.leftCols(r) * is.cast<cplx>().asDiagonal();

  const CMatrix Mt = W.adjoint() * sys.M() * T;
  const double mass_err = (Mt - CMatrix::Identity(r, r)).norm();
  if (!(mass_err <= 1e-8 * std::sqrt(static_cast<double>(r)))) {
    std::ostringstream os;
    os << "projected mass deviates from identity by " << mass_err;
    throw Error(ErrorKind::RankDeficient, os.str());
  }

  ReductionResult out;
  auto& rom = out.rom;
  rom.damping = sys.damping();
  rom.Kt = W.adjoint() * sys.K() * T;
  if (!proportional) rom.Dt = W.adjoint() * damping_matrix(sys) * T;
  rom.But = W.adjoint() * sys.Bu();
  rom.Cpt = sys.Cp() * T;
  rom.Cvt = sys.Cv() * T;
  out.report = make_report(svd.s, r);
  return out;
}

ReductionResult sopvbt(const SecondOrderSystem& sys, Eigen::Index r, bool proportional) {
  const auto g = exact_gramians(sys);
  return sopvbt_from_factors(sys, g.Rp, g.Lv, r, proportional);
}

CMatrix rom_transfer(const ReducedSecondOrderModel& rom, cplx s) {
  const auto r = rom.r();
  CMatrix phi;
  if (rom.Dt) {
    phi = s * s * CMatrix::Identity(r, r) + s * *rom.Dt + rom.Kt;
  } else {
    const auto c = eval_coefficients(rom.damping, s);
    phi = c.n * CMatrix::Identity(r, r) + c.d * rom.Kt;
  }
  const Eigen::PartialPivLU<CMatrix> lu(phi);
  if (!(lu.rcond() >= 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << "reduced pencil singular at s = " << s;
    throw SingularPencilError(os.str());
  }
  return (s * rom.Cvt + rom.Cpt) * lu.solve(rom.But);
}

SecondOrderSystem rom_as_system(const ReducedSecondOrderModel& rom) {
  if (rom.Dt) {
    throw Error(ErrorKind::UnsupportedDamping, "ROM carries an explicit damping matrix");
  }
  const auto r = rom.r();
  return SecondOrderSystem(CMatrix::Identity(r, r), rom.Kt, rom.damping, rom.But, rom.Cpt,
                           rom.Cvt);
}

StabilityReport check_stability(const ReducedSecondOrderModel& rom) {
  const auto r = rom.r();
  CMatrix D;
  if (rom.Dt) {
    D = *rom.Dt;
  } else {
    const auto [f, g] = rom.damping.constant_coefficients();
    D = f * CMatrix::Identity(r, r) + g * rom.Kt;
  }
  CMatrix A = CMatrix::Zero(2 * r, 2 * r);
  A.topRightCorner(r, r).setIdentity();
  A.bottomLeftCorner(r, r) = -rom.Kt;
  A.bottomRightCorner(r, r) = -D;

  CVector lambda;
  if (A.imag().isZero(0.0)) {
    lambda = Eigen::EigenSolver<RMatrix>(A.real(), false).eigenvalues();
  } else {
    lambda = Eigen::ComplexEigenSolver<CMatrix>(A, false).eigenvalues();
  }
  double max_re = -std::numeric_limits<double>::infinity();
  double max_abs = 1.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    max_re = std::max(max_re, lambda(i).real());
    max_abs = std::max(max_abs, std::abs(lambda(i)));
  }
  if (std::abs(max_re) <= kMarginalTol * max_abs) max_re = 0.0;
  return {max_re < 0.0, max_re};
}

TruncationReport singular_value_profile(const LoewnerDataSet& ds) {
  const RVector s = thin_svd(ds.Mq).s;
  return make_report(s, numerical_rank(s));
}

}  // namespace soqbt
