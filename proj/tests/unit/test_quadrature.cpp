#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "soqbt/errors.hpp"
#include "soqbt/quadrature.hpp"

using namespace soqbt;

namespace {

std::vector<double> positive(const QuadratureRule& q) {
  std::vector<double> out;
  for (double f : q.freqs)
    if (f > 0) out.push_back(f);
  return out;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_CASE("exp_trapezoid construction") {
  const auto q = exp_trapezoid(1.0, 10.0, 4);
  REQUIRE(q.size() == 4);
  CHECK(q.freqs[0] == doctest::Approx(-1.0));
  CHECK(q.freqs[1] == doctest::Approx(1.0));
  CHECK(q.freqs[2] == doctest::Approx(-10.0));
  CHECK(q.freqs[3] == doctest::Approx(10.0));
  CHECK(q.is_pair_ordered());
  for (double w : q.weights) CHECK(w > 0.0);
  CHECK(q.weights[0] == q.weights[1]);
  CHECK(q.weights[2] == q.weights[3]);
  // Two points: each carries half the interval.
  CHECK(q.weights[0] * q.weights[0] == doctest::Approx(4.5 / (2 * kPi)));
}

TEST_CASE("exp_trapezoid weights follow the half-sum rule") {
  const auto q = exp_trapezoid(1e-2, 1e2, 40);
  const auto f = positive(q);
  REQUIRE(f.size() == 20);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double lo = j == 0 ? f[0] : f[j - 1];
    const double hi = j + 1 == f.size() ? f.back() : f[j + 1];
    const double delta = 0.5 * (hi - lo);
    CHECK(rel_close(q.weights[2 * j] * q.weights[2 * j], delta / (2 * kPi), 1e-13));
  }
  for (std::size_t j = 1; j < f.size(); ++j) CHECK(f[j] > f[j - 1]);
}

TEST_CASE("exp_trapezoid weights are scale covariant") {
  const double c = 7.5;
  const auto a = exp_trapezoid(0.1, 20.0, 30);
  const auto b = exp_trapezoid(0.1 * c, 20.0 * c, 30);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(rel_close(b.freqs[j], c * a.freqs[j], 1e-13));
    CHECK(rel_close(b.weights[j] * b.weights[j], c * a.weights[j] * a.weights[j], 1e-12));
  }
}

TEST_CASE("exp_trapezoid total weight approaches the interval length") {
  double prev_err = INFINITY;
  for (int N : {20, 40, 80, 160}) {
    const auto q = exp_trapezoid(1.0, 100.0, N);
    double total = 0.0;
    for (double w : q.weights) total += w * w;
    // Both half-lines together cover 2 * 99 rad/s.
    const double err = std::abs(total - 2.0 * 99.0 / (2 * kPi));
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }
}

TEST_CASE("exp_trapezoid rejects bad ranges") {
  CHECK_THROWS_AS(exp_trapezoid(0.0, 1.0, 4), Error);
  CHECK_THROWS_AS(exp_trapezoid(2.0, 1.0, 4), Error);
  CHECK_THROWS_AS(exp_trapezoid(1.0, 2.0, 3), Error);
  CHECK_THROWS_AS(exp_trapezoid(1.0, 2.0, 0), Error);
  try {
    exp_trapezoid(-1.0, 2.0, 4);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidRange);
  }
}

TEST_CASE("interleave on [1, 1000]") {
  const auto rules = interleave(1.0, 1000.0, 4);
  const auto r = positive(rules.right);
  const auto l = positive(rules.left);
  REQUIRE(r.size() == 2);
  REQUIRE(l.size() == 2);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(100.0));
  CHECK(l[0] == doctest::Approx(10.0));
  CHECK(l[1] == doctest::Approx(1000.0));
  CHECK(rules.left.side == Side::Left);
  CHECK(rules.right.side == Side::Right);
}

TEST_CASE("interleave rules are disjoint and reassemble the grid") {
  for (int N : {2, 8, 50, 200}) {
    const auto rules = interleave(1e-3, 1e1, N);
    CHECK(rules.left.size() == static_cast<std::size_t>(N));
    CHECK(rules.right.size() == static_cast<std::size_t>(N));
    CHECK(rules.left.is_pair_ordered());
    CHECK(rules.right.is_pair_ordered());
    std::set<double> l(rules.left.freqs.begin(), rules.left.freqs.end());
    for (double f : rules.right.freqs) CHECK(l.count(f) == 0);

    std::vector<double> all = positive(rules.left);
    const auto r = positive(rules.right);
    all.insert(all.end(), r.begin(), r.end());
    std::sort(all.begin(), all.end());
    const auto grid = logspace(1e-3, 1e1, N);
    REQUIRE(all.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(all[i] == grid[i]);
  }
}

TEST_CASE("conjugate_pair rule") {
  const auto rules = conjugate_pair(0.1, 10.0, 8);
  REQUIRE(rules.right.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(rules.left.freqs[j] == -rules.right.freqs[j]);
    CHECK(rules.left.weights[j] == rules.right.weights[j]);
  }
}

TEST_CASE("pair-order detection") {
  QuadratureRule q;
  q.freqs = {-1.0, 1.0, -2.0, 2.0};
  q.weights = {0.5, 0.5, 0.3, 0.3};
  CHECK(q.is_pair_ordered());
  q.weights[3] = 0.4;
  CHECK_FALSE(q.is_pair_ordered());
  q.weights[3] = 0.3;
  q.freqs = {-1.0, 2.0, -2.0, 1.0};
  CHECK_FALSE(q.is_pair_ordered());
  q.freqs = {-1.0, 1.0, -2.0};
  q.weights = {1, 1, 1};
  CHECK_FALSE(q.is_pair_ordered());
}

TEST_CASE("rule check rejects nonpositive weights") {
  QuadratureRule q;
  q.freqs = {1.0, 2.0};
  q.weights = {1.0, 0.0};
  CHECK_THROWS_AS(q.check(), Error);
  q.weights = {1.0};
  CHECK_THROWS_AS(q.check(), Error);
}

TEST_CASE("hypothesis report flags h collisions") {
  QuadratureRule left, right;
  left.side = Side::Left;
  left.freqs = {2.0};
  left.weights = {1.0};
  right.freqs = {-2.0, 2.0};
  right.weights = {1.0, 1.0};
  const auto rep = validate_for_general_assembly(left, right, Rayleigh{});
  REQUIRE(rep.violations.size() == 2);
  for (const auto& v : rep.violations) CHECK(v.kind == HypothesisKind::HCollision);
  CHECK_FALSE(rep.summary().empty());
}

TEST_CASE("hypothesis report flags a zero right node") {
  QuadratureRule left, right;
  left.side = Side::Left;
  left.freqs = {1.0};
  left.weights = {1.0};
  right.freqs = {0.0, 3.0};
  right.weights = {1.0, 1.0};
  const auto rep = validate_for_general_assembly(left, right, Rayleigh{0.1, 0.1});
  bool found = false;
  for (const auto& v : rep.violations) {
    if (v.kind == HypothesisKind::ZeroRightNode && v.right_index == 0) found = true;
  }
  CHECK(found);
}

TEST_CASE("interleaved rules with Rayleigh damping pass validation") {
  const auto rules = interleave(1e-3, 1e1, 200);
  CHECK(validate_for_general_assembly(rules.left, rules.right, Rayleigh{0.002, 0.002}).ok());
  CHECK(validate_for_general_assembly(rules.left, rules.right, Rayleigh{}).ok());
}

TEST_CASE("h collision threshold") {
  CHECK(h_collides(cplx(1.0, 0.0), cplx(1.0 + 1e-14, 0.0)));
  CHECK_FALSE(h_collides(cplx(1.0, 0.0), cplx(1.0 + 1e-9, 0.0)));
  CHECK(h_collides(cplx(0.0, 0.0), cplx(1e-13, 0.0)));
}
