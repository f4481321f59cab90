#pragma once

#include <string>
#include <vector>

#include "soqbt/reduction.hpp"

namespace soqbt {

enum class DampingModel { Rayleigh, Structural };

/// Least-squares damping fit
///   J(params) = sum_k || g_k - C(s_k) phi(s_k)^{-1} B~ ||_F^2,
///   C(s) = C~p + s C~v,
///   Rayleigh:   phi = (s^2 + s alpha) M~ + (1 + s beta) K~,
///   structural: phi = s^2 M~ + (1 + i eta) K~.
/// M~ is kept general even though balanced ROMs have M~ = I.
struct DampingFitProblem {
  std::vector<cplx> nodes;
  std::vector<CMatrix> data;
  CMatrix Mt, Kt, Bt, Cpt, Cvt;
  DampingModel model = DampingModel::Rayleigh;

  /// Throws DimensionMismatch or InvalidParams.
  void check() const;
  std::size_t parameter_count() const { return model == DampingModel::Rayleigh ? 2 : 1; }
};

/// Problem for a ROM (identity mass) against samples g_k = G(s_k).
DampingFitProblem make_fit_problem(const ReducedSecondOrderModel& rom,
                                   const std::vector<TransferSample>& samples,
                                   DampingModel model);

/// Throws SingularReducedPencil naming the offending sample.
double fit_cost(const DampingFitProblem& problem, const RVector& params);

/// Analytic gradient. With E_k the residual, X_k = phi^{-1} B~ and
/// Z_k = phi^{-H} C(s_k)^H E_k:
///   dJ/dalpha = sum_k 2 Re(s_k tr(Z_k^H M~ X_k)),
///   dJ/dbeta  = sum_k 2 Re(s_k tr(Z_k^H K~ X_k)),
///   dJ/deta   = sum_k 2 Re(i tr(Z_k^H K~ X_k)).
RVector fit_gradient(const DampingFitProblem& problem, const RVector& params);

/// Cost and gradient from one factorization per sample.
std::pair<double, RVector> fit_cost_and_gradient(const DampingFitProblem& problem,
                                                 const RVector& params);

struct FitOptions {
  double grad_tol = 1e-8;
  /// Relative: stops once |step| <= step_tol (1 + |x|) and the cost no
  /// longer drops beyond roundoff.
  double step_tol = 1e-8;
  int max_iter = 500;
};

enum class FitStop { Gradient, Step, MaxIter, LineSearch };

struct FitTracePoint {
  RVector params;
  double cost = 0.0;
};

struct FitResult {
  RVector params;
  double final_cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  FitStop stop = FitStop::MaxIter;
  std::vector<FitTracePoint> trace;  // accepted iterates, cost nonincreasing
  std::vector<std::string> warnings;
};

std::string_view to_string(FitStop stop);

/// BFGS with Armijo backtracking (c = 1e-4, halving) in the natural parameter
/// scale. A unit step that still descends steeply is doubled while the cost
/// keeps dropping. Trial points with a singular pencil count as infinite cost.
/// Parameters below 1e-12 in magnitude are clamped to zero with a warning.
/// Throws SingularReducedPencil when the initial point is infeasible.
FitResult fit_damping(const DampingFitProblem& problem, const RVector& init,
                      const FitOptions& opts = {});

/// Damping model for fitted parameters. Negative values are rejected by the
/// DampingSpec constructors with InvalidParams.
DampingSpec fitted_damping(DampingModel model, const RVector& params);

/// ROM with the damping model replaced; matrices untouched.
ReducedSecondOrderModel with_fitted_damping(const ReducedSecondOrderModel& rom,
                                            DampingModel model, const RVector& params);

}  // namespace soqbt
