#pragma once

#include <optional>

#include "soqbt/damping.hpp"
#include "soqbt/types.hpp"

namespace soqbt {

/// Full-order second-order model
///   M x'' + D(s) x' + K x = Bu u,   y = Cp x + Cv x'
/// with generalized proportional damping D(s) = f(s) M + g(s) K.
///
/// Matrices are stored complex so the same type covers real benchmark models
/// and complex-valued data-driven realizations. Damping is kept symbolic;
/// structural damping therefore only makes the pencil complex.
class SecondOrderSystem {
 public:
  /// Validates dimensions and rejects a mass matrix whose reciprocal
  /// condition estimate falls below 1e-14.
  SecondOrderSystem(CMatrix M, CMatrix K, DampingSpec damping, CMatrix Bu, CMatrix Cp,
                    CMatrix Cv);

  const CMatrix& M() const { return M_; }
  const CMatrix& K() const { return K_; }
  const DampingSpec& damping() const { return damping_; }
  const CMatrix& Bu() const { return Bu_; }
  const CMatrix& Cp() const { return Cp_; }
  const CMatrix& Cv() const { return Cv_; }

  Eigen::Index n() const { return M_.rows(); }
  Eigen::Index m() const { return Bu_.cols(); }
  Eigen::Index p() const { return Cp_.rows(); }

  /// True when every stored matrix has zero imaginary part.
  bool is_real() const;

  /// Same matrices, different damping model.
  SecondOrderSystem with_damping(DampingSpec damping) const;

 private:
  CMatrix M_, K_, Bu_, Cp_, Cv_;
  DampingSpec damping_;
};

/// Transfer-function sample at one complex frequency. Gp, Gv and G_prime are
/// filled on request; when both split parts are present, G = Gp + Gv where
/// Gv already carries the factor s.
struct TransferSample {
  cplx node{};
  CMatrix G;
  std::optional<CMatrix> Gp;
  std::optional<CMatrix> Gv;
  std::optional<CMatrix> G_prime;
};

/// phi(s) = s^2 M + s D(s) + K, assembled as n(s) M + d(s) K.
CMatrix eval_pencil(const SecondOrderSystem& sys, cplx s);

/// G(s) = (s Cv + Cp) phi(s)^{-1} Bu via an LU solve.
CMatrix eval_transfer(const SecondOrderSystem& sys, cplx s);

/// (Gp, Gv) with Gp = Cp phi^{-1} Bu and Gv = s Cv phi^{-1} Bu.
std::pair<CMatrix, CMatrix> eval_transfer_split(const SecondOrderSystem& sys, cplx s);

/// G'(s) = Cv phi^{-1} Bu - (s Cv + Cp) phi^{-1} phi'(s) phi^{-1} Bu,
/// phi'(s) = n'(s) M + d'(s) K.
CMatrix eval_transfer_derivative(const SecondOrderSystem& sys, cplx s);

/// All requested quantities at one node from a single factorization.
TransferSample eval_sample(const SecondOrderSystem& sys, cplx s, bool with_split,
                           bool with_derivative);

/// First companion realization (E, A, B, C) of a constant-damping system.
struct CompanionForm {
  CMatrix E, A, B, C;
};

/// E = blkdiag(I, M), A = [[0, I], [-K, -D]], B = [0; Bu], C = [Cp, Cv] with
/// D = f M + g K. Throws UnsupportedDamping for frequency-dependent damping.
CompanionForm companion_form(const SecondOrderSystem& sys);

/// C (sE - A)^{-1} B, used as an independent check on the second-order path.
CMatrix first_order_transfer(const CompanionForm& fo, cplx s);

/// Explicit damping matrix f M + g K for constant damping.
CMatrix damping_matrix(const SecondOrderSystem& sys);

}  // namespace soqbt
