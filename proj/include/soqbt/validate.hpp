#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soqbt {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed error, or failure count
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 20240517;
  /// Flips the sign of the assembled Mq before the oracle comparison, as a
  /// negative control for the battery itself.
  bool inject_fault = false;
};

/// Data formulas vs intrusive quadrature factors, random Rayleigh system
/// n = 12, m = p = 2, 8 + 8 interleaved nodes. Tolerance 1e-10.
CheckResult check_general_oracle(const ValidateOptions& opts);

/// Hermite formulas vs intrusive factors, conjugate-pair rule N = 8, Cv = 0.
/// Tolerance 1e-9.
CheckResult check_hermite_oracle(const ValidateOptions& opts);

/// Both resolvent identities on 50 random 6 x 6 instances. Tolerance 1e-12.
CheckResult check_resolvent_identities(const ValidateOptions& opts);

/// Analytic damping-fit gradients vs central differences, 20 random problems
/// per damping model. Tolerance 1e-6 relative.
CheckResult check_fit_gradients(const ValidateOptions& opts);

/// Hermite ROMs of 20 symmetric SPD Rayleigh systems (n = 30) for
/// r = 2..10 must all be asymptotically stable.
CheckResult check_stability_preservation(const ValidateOptions& opts);

/// Realified data are real to 1e-10 and give the same ROM transfer function
/// as complex data at 50 held-out nodes to 1e-8.
CheckResult check_realification(const ValidateOptions& opts);

/// Runs every check above in order.
std::vector<CheckResult> run_validation(const ValidateOptions& opts);

}  // namespace soqbt
