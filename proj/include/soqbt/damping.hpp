#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "soqbt/types.hpp"

namespace soqbt {

/// D = alpha * M + beta * K.
struct Rayleigh {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Hysteretic damping D(s) = (i * eta / s) * K.
struct Structural {
  double eta = 0.0;
};

/// D(s) = f(s) M + g(s) K with caller-supplied coefficient functions.
/// `constant` marks f and g as frequency independent, which lets the
/// companion form and Lyapunov-based routines accept the model.
struct Generalized {
  std::function<cplx(cplx)> f;
  std::function<cplx(cplx)> g;
  std::function<cplx(cplx)> f_prime;
  std::function<cplx(cplx)> g_prime;
  bool constant = false;
};

class DampingSpec {
 public:
  using Variant = std::variant<Rayleigh, Structural, Generalized>;

  DampingSpec() : value_(Rayleigh{}) {}
  DampingSpec(Rayleigh r);    // NOLINT(google-explicit-constructor)
  DampingSpec(Structural s);  // NOLINT(google-explicit-constructor)
  DampingSpec(Generalized g); // NOLINT(google-explicit-constructor)

  const Variant& value() const { return value_; }
  bool is_rayleigh() const { return std::holds_alternative<Rayleigh>(value_); }
  bool is_structural() const { return std::holds_alternative<Structural>(value_); }
  bool is_generalized() const { return std::holds_alternative<Generalized>(value_); }

  /// True when f and g do not depend on s (Rayleigh, or Generalized flagged constant).
  bool is_constant() const;

  /// True when conj(f(s)) = f(conj(s)) and likewise for g. Holds for
  /// Rayleigh; fails for structural damping. Generalized specs are trusted
  /// only when constant with real coefficient values.
  bool is_conjugate_symmetric() const;

  /// Constant coefficients (f, g); throws UnsupportedDamping otherwise.
  std::pair<cplx, cplx> constant_coefficients() const;

  std::string describe() const;

 private:
  Variant value_;
};

/// Values of the damping coefficient functions and the derived scalars
///   d(s) = 1 + s g(s),  n(s) = s^2 + s f(s),  h(s) = n(s) / d(s)
/// at a single point. Derivatives are filled only when requested.
struct CoefficientEval {
  cplx s{};
  cplx f{}, g{}, n{}, d{}, h{};
  std::optional<cplx> f_prime, g_prime, n_prime, d_prime, h_prime;

  bool has_derivatives() const { return h_prime.has_value(); }
};

/// Evaluates f, g, n, d, h (and optionally their derivatives) at s.
///
/// Throws DomainError for structural damping at s = 0 and DivisionByZero when
/// d(s) = 0, since h is undefined there.
CoefficientEval eval_coefficients(const DampingSpec& damping, cplx s,
                                  bool with_derivatives = false);

}  // namespace soqbt
