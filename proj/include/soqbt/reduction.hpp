#pragma once

#include <optional>
#include <vector>

#include "soqbt/gramians.hpp"
#include "soqbt/loewner.hpp"

namespace soqbt {

/// Reduced model s^2 x + s D~(s) x + K~ x = B~ u, y = C~p x + C~v x'.
/// The mass is the identity. Damping is D~(s) = f(s) I + g(s) K~ unless an
/// explicit constant Dt is present (projection-based intrusive ROMs).
struct ReducedSecondOrderModel {
  CMatrix Kt;
  DampingSpec damping;
  std::optional<CMatrix> Dt;
  CMatrix But;
  CMatrix Cpt;
  CMatrix Cvt;

  Eigen::Index r() const { return Kt.rows(); }
  Eigen::Index m() const { return But.cols(); }
  Eigen::Index p() const { return Cpt.rows(); }

  /// Throws DimensionMismatch on inconsistent shapes.
  void check() const;
};

struct TruncationReport {
  std::vector<double> singular_values;  // descending
  Eigen::Index r_used = 0;
  double discarded_mass = 0.0;  // sigma_{r+1} / sigma_1, 0 when nothing is discarded
};

/// Relative singular-value floor for rank decisions.
inline constexpr double kRankTol = 1e-13;

struct ReductionResult {
  ReducedSecondOrderModel rom;
  TruncationReport report;
};

/// Data-driven balancing from the data matrices. With Mq = U S Y^H,
///   K~ = S1^{-1/2} U1^H Kq Y1 S1^{-1/2},  B~ = S1^{-1/2} U1^H Bq,
///   C~p = Cpq Y1 S1^{-1/2},  C~v = Cvq Y1 S1^{-1/2},
/// and the damping model is carried over. Each left singular vector is rotated
/// so its largest-magnitude entry is real positive.
///
/// Throws RankDeficient when sigma_r / sigma_1 < 1e-13 and DimensionMismatch
/// when r exceeds the matrix dimensions.
ReductionResult soquadpvbt(const LoewnerDataSet& ds, Eigen::Index r,
                           const DampingSpec& damping);

/// Intrusive position-velocity balancing with square-root factors Rp, Lv of
/// Pp and Qv: SVD of Lv^H M Rp, W = Lv U1 S1^{-1/2}, T = Rp V1 S1^{-1/2} and
///   K~ = W^H K T, B~ = W^H Bu, C~p = Cp T, C~v = Cv T.
/// With `proportional` the ROM keeps D~ = f I + g K~; otherwise D~ = W^H D T.
ReductionResult sopvbt_from_factors(const SecondOrderSystem& sys, const CMatrix& Rp,
                                    const CMatrix& Lv, Eigen::Index r, bool proportional);

/// sopvbt_from_factors with exact Gramian factors.
/// Throws UnstablePencil, UnsupportedDamping, RankDeficient.
ReductionResult sopvbt(const SecondOrderSystem& sys, Eigen::Index r, bool proportional = false);

/// (s C~v + C~p) (s^2 I + s D~(s) + K~)^{-1} B~. Throws SingularPencilError.
CMatrix rom_transfer(const ReducedSecondOrderModel& rom, cplx s);

/// Full-order view of a proportional ROM (identity mass), for reuse of the
/// system-level routines. Throws UnsupportedDamping when Dt is explicit.
SecondOrderSystem rom_as_system(const ReducedSecondOrderModel& rom);

struct StabilityReport {
  bool stable = false;
  double max_real_part = 0.0;
};

/// Eigenvalues of the companion matrix [[0, I], [-K~, -D~]]. Real parts within
/// 1e-11 * max(1, |lambda|max) of zero count as zero, so undamped ROMs report
/// marginal stability. Throws UnsupportedDamping for frequency-dependent damping.
StabilityReport check_stability(const ReducedSecondOrderModel& rom);

/// Full singular spectrum of Mq; r_used is the numerical rank at 1e-13.
TruncationReport singular_value_profile(const LoewnerDataSet& ds);

}  // namespace soqbt
