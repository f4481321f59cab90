#pragma once

#include <functional>
#include <vector>

#include "soqbt/types.hpp"

namespace soqbt {

enum class Spacing { Log, Linear };

struct FrequencyGrid {
  std::vector<double> omegas;  // strictly increasing, positive, rad/s
  Spacing spacing = Spacing::Log;

  /// Throws InvalidRange unless omegas are positive and strictly increasing.
  void check() const;

  static FrequencyGrid log(double lo, double hi, int count = 500);
  static FrequencyGrid linear(double lo, double hi, int count = 500);
};

using TransferMap = std::function<CMatrix(cplx)>;

/// Evaluates `G` at i * omega for every grid point, in grid order.
std::vector<CMatrix> sample_map(const TransferMap& G, const FrequencyGrid& grid);

/// Largest singular value.
double spectral_norm(const CMatrix& A);

/// ||G_k - G~_k||_2 / ||G_k||_2 per point. Throws ZeroReference.
std::vector<double> pointwise_relerr(const std::vector<CMatrix>& ref,
                                     const std::vector<CMatrix>& test);

/// max_k ||G_k - G~_k||_2 / max_k ||G_k||_2.
double relerr_hinf(const std::vector<CMatrix>& ref, const std::vector<CMatrix>& test);

/// sqrt(sum_k ||G_k - G~_k||_F^2 / sum_k ||G_k||_F^2).
double relerr_h2(const std::vector<CMatrix>& ref, const std::vector<CMatrix>& test);

std::vector<double> pointwise_relerr(const TransferMap& ref, const TransferMap& test,
                                     const FrequencyGrid& grid);
double relerr_hinf(const TransferMap& ref, const TransferMap& test, const FrequencyGrid& grid);
double relerr_h2(const TransferMap& ref, const TransferMap& test, const FrequencyGrid& grid);

}  // namespace soqbt
