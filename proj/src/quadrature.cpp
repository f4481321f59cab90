#include "soqbt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "soqbt/errors.hpp"

namespace soqbt {

void QuadratureRule::check() const {
  if (freqs.size() != weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "quadrature rule: freqs/weights length differ");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::ZeroWeight, "quadrature weights must be positive");
  }
}

bool QuadratureRule::is_pair_ordered() const {
  if (freqs.size() % 2 != 0 || freqs.size() != weights.size()) return false;
  for (std::size_t i = 0; i < freqs.size(); i += 2) {
    if (freqs[i] != -freqs[i + 1] || weights[i] != weights[i + 1]) return false;
    if (freqs[i] == 0.0) return false;
  }
  return true;
}

QuadratureRule QuadratureRule::negated(Side new_side) const {
  QuadratureRule out = *this;
  out.side = new_side;
  for (auto& f : out.freqs) f = -f;
  return out;
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = std::sqrt(lo * hi);
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> trapezoid_weights(const std::vector<double>& freqs, double lo, double hi) {
  const std::size_t L = freqs.size();
  std::vector<double> w(L);
  if (L == 1) {
    w[0] = std::sqrt((hi - lo) / (2.0 * kPi));
    return w;
  }
  for (std::size_t j = 0; j < L; ++j) {
    double delta;
    if (j == 0) {
      delta = 0.5 * (freqs[1] - freqs[0]);
    } else if (j + 1 == L) {
      delta = 0.5 * (freqs[L - 1] - freqs[L - 2]);
    } else {
      delta = 0.5 * (freqs[j + 1] - freqs[j - 1]);
    }
    w[j] = std::sqrt(delta / (2.0 * kPi));
  }
  return w;
}

QuadratureRule mirror_pairs(const std::vector<double>& positive_freqs,
                            const std::vector<double>& weights, Side side) {
  QuadratureRule rule;
  rule.side = side;
  rule.freqs.reserve(2 * positive_freqs.size());
  rule.weights.reserve(2 * positive_freqs.size());
  for (std::size_t j = 0; j < positive_freqs.size(); ++j) {
    rule.freqs.push_back(-positive_freqs[j]);
    rule.freqs.push_back(positive_freqs[j]);
    rule.weights.push_back(weights[j]);
    rule.weights.push_back(weights[j]);
  }
  return rule;
}

namespace {

void check_range(double lo, double hi, int N) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::InvalidRange, "need 0 < omega_min < omega_max");
  }
  if (N < 2 || N % 2 != 0) {
    throw Error(ErrorKind::InvalidRange, "node count N must be even and >= 2");
  }
}

}  // namespace

QuadratureRule exp_trapezoid(double omega_min, double omega_max, int N, Side side) {
  check_range(omega_min, omega_max, N);
  const auto freqs = logspace(omega_min, omega_max, N / 2);
  return mirror_pairs(freqs, trapezoid_weights(freqs, omega_min, omega_max), side);
}

RulePair interleave(double omega_min, double omega_max, int N) {
  check_range(omega_min, omega_max, N);
  const auto all = logspace(omega_min, omega_max, N);
  std::vector<double> right, left;
  for (std::size_t i = 0; i < all.size(); ++i) (i % 2 == 0 ? right : left).push_back(all[i]);
  RulePair out;
  out.right = mirror_pairs(right, trapezoid_weights(right, omega_min, omega_max), Side::Right);
  out.left = mirror_pairs(left, trapezoid_weights(left, omega_min, omega_max), Side::Left);
  return out;
}

RulePair conjugate_pair(double omega_min, double omega_max, int N) {
  RulePair out;
  out.right = exp_trapezoid(omega_min, omega_max, N, Side::Right);
  out.left = out.right.negated(Side::Left);
  return out;
}

bool h_collides(cplx h_left, cplx h_right) {
  const double scale = std::max({std::abs(h_left), std::abs(h_right), 1.0});
  return std::abs(h_left - h_right) < kHCollisionTol * scale;
}

std::string HypothesisReport::summary(std::size_t max_lines) const {
  std::ostringstream os;
  std::size_t shown = 0;
  for (const auto& v : violations) {
    if (shown++ == max_lines) {
      os << "... (" << violations.size() - max_lines << " more)\n";
      break;
    }
    os << v.message << '\n';
  }
  return os.str();
}

HypothesisReport validate_for_general_assembly(const QuadratureRule& left,
                                               const QuadratureRule& right,
                                               const DampingSpec& damping) {
  HypothesisReport report;
  auto add = [&report](HypothesisKind kind, long k, long j, const std::string& msg) {
    report.violations.push_back({kind, k, j, msg});
  };

  auto evaluate = [&](const QuadratureRule& rule, bool is_left) {
    std::vector<std::optional<cplx>> hs(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const long idx = static_cast<long>(i);
      const std::string where = std::string(is_left ? "left" : "right") + " node " +
                                std::to_string(i) + " (freq " + std::to_string(rule.freqs[i]) +
                                ")";
      try {
        hs[i] = eval_coefficients(damping, rule.node(i)).h;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DivisionByZero) {
          add(is_left ? HypothesisKind::LeftDampingZero : HypothesisKind::RightDampingZero,
              is_left ? idx : -1, is_left ? -1 : idx, where + ": d(s) = 0");
        } else {
          add(HypothesisKind::CoefficientError, is_left ? idx : -1, is_left ? -1 : idx,
              where + ": " + e.what());
        }
      }
    }
    return hs;
  };

  for (std::size_t j = 0; j < right.size(); ++j) {
    if (right.freqs[j] == 0.0) {
      add(HypothesisKind::ZeroRightNode, -1, static_cast<long>(j),
          "right node " + std::to_string(j) + ": zeta_j = 0");
    }
  }
  const auto h_left = evaluate(left, true);
  const auto h_right = evaluate(right, false);
  for (std::size_t k = 0; k < left.size(); ++k) {
    if (!h_left[k]) continue;
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (!h_right[j]) continue;
      if (h_collides(*h_left[k], *h_right[j])) {
        std::ostringstream os;
        os.precision(17);
        os << "h(i theta_" << k << ") = h(i zeta_" << j << ") = " << *h_left[k]
           << " (left freq " << left.freqs[k] << ", right freq " << right.freqs[j] << ")";
        add(HypothesisKind::HCollision, static_cast<long>(k), static_cast<long>(j), os.str());
      }
    }
  }
  return report;
}

}  // namespace soqbt
