#include "soqbt/metrics.hpp"

#include <cmath>

#include "soqbt/errors.hpp"
#include "soqbt/parallel.hpp"
#include "soqbt/quadrature.hpp"

namespace soqbt {

namespace {

void check_pair(const std::vector<CMatrix>& ref, const std::vector<CMatrix>& test) {
  if (ref.size() != test.size() || ref.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "sampled maps must be nonempty and equally long");
  }
  for (std::size_t k = 0; k < ref.size(); ++k) {
    if (ref[k].rows() != test[k].rows() || ref[k].cols() != test[k].cols()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample " + std::to_string(k) + " shapes differ");
    }
  }
}

}  // namespace

void FrequencyGrid::check() const {
  if (omegas.empty()) throw Error(ErrorKind::InvalidRange, "empty frequency grid");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || (i > 0 && !(omegas[i] > omegas[i - 1]))) {
      throw Error(ErrorKind::InvalidRange, "grid must be positive and strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::log(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(ErrorKind::InvalidRange, "log grid needs 0 < lo < hi and count >= 2");
  }
  FrequencyGrid g{logspace(lo, hi, count), Spacing::Log};
  g.check();
  return g;
}

FrequencyGrid FrequencyGrid::linear(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(ErrorKind::InvalidRange, "linear grid needs 0 < lo < hi and count >= 2");
  }
  FrequencyGrid g;
  g.spacing = Spacing::Linear;
  for (int i = 0; i < count; ++i) g.omegas.push_back(lo + (hi - lo) * i / (count - 1));
  g.omegas.back() = hi;
  g.check();
  return g;
}

std::vector<CMatrix> sample_map(const TransferMap& G, const FrequencyGrid& grid) {
  grid.check();
  std::vector<CMatrix> out(grid.omegas.size());
  parallel_for(out.size(), [&](std::size_t k) { out[k] = G(cplx(0.0, grid.omegas[k])); });
  return out;
}

double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  if (A.size() == 1) return std::abs(A(0, 0));
  return Eigen::JacobiSVD<CMatrix>(A).singularValues()(0);
}

std::vector<double> pointwise_relerr(const std::vector<CMatrix>& ref,
                                     const std::vector<CMatrix>& test) {
  check_pair(ref, test);
  std::vector<double> out(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const double nr = spectral_norm(ref[k]);
    if (nr == 0.0) {
      throw Error(ErrorKind::ZeroReference, "reference vanishes at point " + std::to_string(k));
    }
    out[k] = spectral_norm(ref[k] - test[k]) / nr;
  }
  return out;
}

double relerr_hinf(const std::vector<CMatrix>& ref, const std::vector<CMatrix>& test) {
  check_pair(ref, test);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    num = std::max(num, spectral_norm(ref[k] - test[k]));
    den = std::max(den, spectral_norm(ref[k]));
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroReference, "reference vanishes on the whole grid");
  return num / den;
}

double relerr_h2(const std::vector<CMatrix>& ref, const std::vector<CMatrix>& test) {
  check_pair(ref, test);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    num += (ref[k] - test[k]).squaredNorm();
    den += ref[k].squaredNorm();
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroReference, "reference vanishes on the whole grid");
  return std::sqrt(num / den);
}

std::vector<double> pointwise_relerr(const TransferMap& ref, const TransferMap& test,
                                     const FrequencyGrid& grid) {
  return pointwise_relerr(sample_map(ref, grid), sample_map(test, grid));
}

double relerr_hinf(const TransferMap& ref, const TransferMap& test, const FrequencyGrid& grid) {
  return relerr_hinf(sample_map(ref, grid), sample_map(test, grid));
}

double relerr_h2(const TransferMap& ref, const TransferMap& test, const FrequencyGrid& grid) {
  return relerr_h2(sample_map(ref, grid), sample_map(test, grid));
}

}  // namespace soqbt
