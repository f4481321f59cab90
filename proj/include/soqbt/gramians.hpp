#pragma once

#include "soqbt/quadrature.hpp"
#include "soqbt/system.hpp"

namespace soqbt {

/// Quadrature-implied Gramian factors, built with state-space access.
///   Rp_check block j = rho_j phi(i zeta_j)^{-1} Bu                 (n x mJ)
///   Lv_check block k = (w_k (Cp + i theta_k Cv) phi(i theta_k)^{-1})^H  (n x pK)
/// so that Rp_check Rp_check^H ~ Pp and Lv_check Lv_check^H ~ Qv.
struct QuadFactors {
  CMatrix Rp_check;
  CMatrix Lv_check;
};

/// Throws SingularPencilError carrying the node index on a singular pencil.
QuadFactors quad_factors(const SecondOrderSystem& sys, const QuadratureRule& left,
                         const QuadratureRule& right);

/// Square-root factors for position-velocity balancing.
///
/// `exact` results come from Lyapunov solves on the companion form and also
/// carry the full first-order Gramians P, Q and their factors R, L. Results of
/// the fine-quadrature fallback only carry the blocks Rp and Lv.
struct GramianFactors {
  CMatrix P, Q;    // 2n x 2n, empty for the fallback path
  CMatrix R, L;    // P = R R^H, Q = L L^H
  CMatrix Rp;      // top n rows of R, or a factor of Pp
  CMatrix Lv;      // bottom n rows of L, or a factor of Qv
  bool exact = false;
};

/// Exact Gramians of the first companion form through the eigendecomposition
/// of E^{-1} A.
///
/// Throws UnsupportedDamping for frequency-dependent damping, UnstablePencil if
/// an eigenvalue has nonnegative real part and IllConditionedEigenvectors if
/// the eigenvector matrix has condition estimate above 1e12.
GramianFactors exact_gramians(const SecondOrderSystem& sys);

struct FineQuadratureOptions {
  int nodes = 10000;
  double lower_decades = 3.0;  // start this many decades below the lowest mode
  double upper_decades = 3.0;  // stop this many decades above the highest mode
};

/// Pp and Qv by a very fine exponential trapezoid rule over the modal band,
/// for systems the Lyapunov route rejects (structural damping, defective pencils).
GramianFactors fine_quadrature_gramians(const SecondOrderSystem& sys,
                                        const FineQuadratureOptions& opts = {});

/// exact_gramians when possible, else fine_quadrature_gramians.
GramianFactors gramian_factors(const SecondOrderSystem& sys);

struct PvBlocks {
  CMatrix Pp;    // position-controllability Gramian
  CMatrix MQvM;  // M^H Qv M, velocity-observability Gramian
};

PvBlocks pv_blocks(const GramianFactors& g, const SecondOrderSystem& sys);

/// Hermitian square root factor F with F F^H = G, discarding eigenvalues below
/// 1e-14 * lambda_max.
CMatrix psd_factor(const CMatrix& G);

struct ResolventResiduals {
  double first;   // (sX+Y)^{-1} X (zX+Y)^{-1} vs divided difference
  double second;  // (sX+Y)^{-1} Y (zX+Y)^{-1} vs weighted divided difference
};

/// Relative residuals of the two resolvent identities used by the data
/// formulas, for s != z with both shifted matrices nonsingular.
ResolventResiduals resolvent_identity_residuals(const CMatrix& X, const CMatrix& Y, cplx s,
                                                cplx z);

}  // namespace soqbt
