#pragma once

#include <string>
#include <vector>

#include "soqbt/damping.hpp"

namespace soqbt {

enum class Side { Left, Right };

/// Quadrature rule on the imaginary axis. Nodes are i * freqs[j]; weights
/// hold the square roots of the quadrature weights, since the implicit
/// Gramian factors are scaled by these square roots.
struct QuadratureRule {
  std::vector<double> freqs;
  std::vector<double> weights;
  Side side = Side::Right;

  std::size_t size() const { return freqs.size(); }
  cplx node(std::size_t j) const { return cplx(0.0, freqs[j]); }

  /// Checks equal lengths and strictly positive weights.
  void check() const;

  /// True when nodes come in consecutive pairs (2i, 2i+1) with
  /// freqs[2i] = -freqs[2i+1] and equal weights, which is what realification needs.
  bool is_pair_ordered() const;

  /// Rule with every node negated, same weights.
  QuadratureRule negated(Side new_side) const;
};

/// Square-root trapezoid weights for ascending positive frequencies on a
/// symmetric domain: w_j^2 = Delta_j / (2 pi), Delta_j the half-sum of the
/// adjacent gaps (half gap at the ends). A single frequency spans the whole
/// interval [lo, hi].
std::vector<double> trapezoid_weights(const std::vector<double>& freqs, double lo, double hi);

/// Mirrors ascending positive frequencies into pair order
/// (-w1, w1, -w2, w2, ...) with duplicated weights.
QuadratureRule mirror_pairs(const std::vector<double>& positive_freqs,
                            const std::vector<double>& weights, Side side);

/// `count` logarithmically spaced points in [lo, hi] (both endpoints included).
std::vector<double> logspace(double lo, double hi, int count);

/// Exponential trapezoidal rule with N nodes (N/2 log-spaced positive
/// frequencies, mirrored). Throws InvalidRange unless 0 < lo < hi and N is
/// even and at least 2.
QuadratureRule exp_trapezoid(double omega_min, double omega_max, int N, Side side = Side::Right);

struct RulePair {
  QuadratureRule left;
  QuadratureRule right;
};

/// Disjoint left/right rules with N nodes each. N log-spaced positive
/// frequencies are dealt alternately (first to the right rule), each subset
/// gets its own trapezoid weights and is mirrored into pair order.
RulePair interleave(double omega_min, double omega_max, int N);

/// Conjugate-pair configuration for Hermite assembly: the right rule is an
/// exponential trapezoid rule, the left rule its negation.
RulePair conjugate_pair(double omega_min, double omega_max, int N);

enum class HypothesisKind {
  ZeroRightNode,
  LeftDampingZero,
  RightDampingZero,
  HCollision,
  CoefficientError,
};

struct HypothesisViolation {
  HypothesisKind kind;
  long left_index = -1;
  long right_index = -1;
  std::string message;
};

struct HypothesisReport {
  std::vector<HypothesisViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary(std::size_t max_lines = 20) const;
};

/// Relative threshold below which h(left) and h(right) count as colliding.
inline constexpr double kHCollisionTol = 1e-12;

bool h_collides(cplx h_left, cplx h_right);

/// Lists every violated precondition of the general data formulas:
/// zeta_j != 0, d(i theta_k) != 0, d(i zeta_j) != 0, h(i theta_k) != h(i zeta_j).
HypothesisReport validate_for_general_assembly(const QuadratureRule& left,
                                               const QuadratureRule& right,
                                               const DampingSpec& damping);

}  // namespace soqbt
