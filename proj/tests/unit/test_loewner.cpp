#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "soqbt/errors.hpp"
#include "soqbt/generators.hpp"
#include "soqbt/gramians.hpp"
#include "soqbt/loewner.hpp"

using namespace soqbt;

namespace {

CMatrix scalar(cplx v) { return CMatrix::Constant(1, 1, v); }

SecondOrderSystem unit_oscillator() {
  return SecondOrderSystem(scalar(1), scalar(1), Rayleigh{}, scalar(1), scalar(1), scalar(0));
}

QuadratureRule single(double f, Side side) {
  QuadratureRule q;
  q.freqs = {f};
  q.weights = {1.0};
  q.side = side;
  return q;
}

struct OracleErrors {
  double M, K, B, Cp, Cv;
  double worst() const { return std::max({M, K, B, Cp, Cv}); }
};

OracleErrors oracle(const SecondOrderSystem& sys, const LoewnerDataSet& ds, const QuadFactors& qf) {
  const CMatrix& R = qf.Rp_check;
  const CMatrix& L = qf.Lv_check;
  return {rel_diff(ds.Mq, L.adjoint() * sys.M() * R), rel_diff(ds.Kq, L.adjoint() * sys.K() * R),
          rel_diff(ds.Bq, L.adjoint() * sys.Bu()), rel_diff(ds.Cpq, sys.Cp() * R),
          rel_diff(ds.Cvq, sys.Cv() * R)};
}

SecondOrderSystem position_only(const SecondOrderSystem& s) {
  return SecondOrderSystem(s.M(), s.K(), s.damping(), s.Bu(), s.Cp(),
                           CMatrix::Zero(s.p(), s.n()));
}

}  // namespace

TEST_CASE("scalar general assembly") {
  const auto sys = unit_oscillator();
  const auto left = sample_system(sys, single(2.0, Side::Left));
  const auto right = sample_system(sys, single(3.0, Side::Right));
  const auto ds = assemble_general(left, right, sys.damping());
  CHECK(std::abs(ds.Mq(0, 0) - 1.0 / 24.0) < 1e-15);
  CHECK(std::abs(ds.Kq(0, 0) - 1.0 / 24.0) < 1e-15);
  CHECK(std::abs(ds.Bq(0, 0) + 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(ds.Cpq(0, 0) + 1.0 / 8.0) < 1e-15);
  CHECK(std::abs(ds.Cvq(0, 0)) == 0.0);
  CHECK(ds.mode == AssemblyMode::General);
}

TEST_CASE("general data formulas equal the intrusive products") {
  const DampingSpec dampings[] = {Rayleigh{0.1, 0.05}, Rayleigh{}, Structural{0.02}};
  for (const auto& d : dampings) {
    const auto sys = generate_random_spd_system(12, 2, 2, 1234).with_damping(d);
    const auto rules = interleave(0.1, 10.0, 8);
    const auto ds = assemble_general(sample_system(sys, rules.left), sample_system(sys, rules.right),
                                     d);
    const auto e = oracle(sys, ds, quad_factors(sys, rules.left, rules.right));
    CHECK(e.worst() <= 1e-10);
    CHECK(ds.Mq.rows() == 2 * 8);
    CHECK(ds.Mq.cols() == 2 * 8);
    CHECK(ds.left_count() == 8);
    CHECK(ds.right_count() == 8);
  }
}

TEST_CASE("general data with rectangular blocks") {
  const auto sys = generate_random_spd_system(9, 3, 2, 99);
  const auto rules = interleave(0.05, 20.0, 6);
  const auto ds = assemble_general(sample_system(sys, rules.left), sample_system(sys, rules.right),
                                   sys.damping());
  CHECK(ds.Mq.rows() == 2 * 6);
  CHECK(ds.Mq.cols() == 3 * 6);
  CHECK(oracle(sys, ds, quad_factors(sys, rules.left, rules.right)).worst() <= 1e-10);
}

TEST_CASE("zero velocity output reduces the right term to G") {
  const auto sys = position_only(generate_random_spd_system(6, 1, 1, 7));
  const auto rules = interleave(0.1, 10.0, 4);
  auto right = sample_system(sys, rules.right);
  CHECK(right.zero_velocity_output);
  for (auto& s : right.samples) {
    s.Gp.reset();
    s.Gv.reset();
  }
  const auto ds = assemble_general(sample_system(sys, rules.left), right, sys.damping());
  CHECK(oracle(sys, ds, quad_factors(sys, rules.left, rules.right)).worst() <= 1e-10);
  CHECK(ds.Cvq.norm() == 0.0);
}

TEST_CASE("velocity-only output uses the rescaled transfer function") {
  const auto base = generate_random_spd_system(6, 1, 1, 8);
  const SecondOrderSystem sys(base.M(), base.K(), base.damping(), base.Bu(),
                              CMatrix::Zero(1, 6), base.Cv());
  const auto rules = interleave(0.1, 10.0, 4);
  const auto right = sample_system(sys, rules.right);
  for (const auto& s : right.samples) CHECK(rel_diff(*s.Gv, s.G) < 1e-15);
  const auto ds = assemble_general(sample_system(sys, rules.left), right, sys.damping());
  CHECK(oracle(sys, ds, quad_factors(sys, rules.left, rules.right)).worst() <= 1e-10);
}

TEST_CASE("missing split samples") {
  const auto sys = generate_random_spd_system(5, 1, 1, 3);
  const auto rules = interleave(0.1, 10.0, 4);
  auto right = sample_system(sys, rules.right);
  for (auto& s : right.samples) s.Gp.reset();
  try {
    assemble_general(sample_system(sys, rules.left), right, sys.damping());
    FAIL("expected MissingSplitSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingSplitSamples);
  }
}

TEST_CASE("colliding nodes abort the general assembly") {
  // Undamped h(s) = s^2 takes the same value at 2i and -2i.
  const auto sys = unit_oscillator();
  QuadratureRule right;
  right.freqs = {-2.0, 2.0};
  right.weights = {1.0, 1.0};
  try {
    assemble_general(sample_system(sys, single(2.0, Side::Left)), sample_system(sys, right),
                     sys.damping());
    FAIL("expected HypothesisViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HypothesisViolation);
  }
}

TEST_CASE("scalar Hermite block") {
  const auto sys = unit_oscillator();
  QuadratureRule right;
  right.freqs = {-2.0, 2.0};
  right.weights = {1.0, 1.0};
  const auto samples = sample_system(sys, right, true);
  const auto ds = assemble_hermite(samples, sys.damping());
  // Left node k is -right node k, so the matched block for left k is right 1 - k.
  CHECK(std::abs(ds.Mq(0, 1) - 1.0 / 9.0) < 1e-15);
  CHECK(std::abs(ds.Mq(1, 0) - 1.0 / 9.0) < 1e-15);
  // h is even, so the off-pair blocks meet the same h and are confluent too.
  CHECK(std::abs(ds.Mq(0, 0) - 1.0 / 9.0) < 1e-15);
  CHECK(std::abs(ds.Mq(1, 1) - 1.0 / 9.0) < 1e-15);
  CHECK(std::abs(ds.Bq(0, 0) + 1.0 / 3.0) < 1e-15);
  CHECK(ds.mode == AssemblyMode::Hermite);
}

TEST_CASE("Hermite data formulas equal the intrusive products") {
  const DampingSpec dampings[] = {Rayleigh{0.1, 0.05}, Structural{0.02}};
  for (const auto& d : dampings) {
    const auto sys = position_only(generate_random_spd_system(12, 2, 2, 55)).with_damping(d);
    const auto rules = conjugate_pair(0.1, 10.0, 8);
    const auto ds = assemble_hermite(sample_system(sys, rules.right, true), d);
    const auto e = oracle(sys, ds, quad_factors(sys, hermite_left_rule(rules.right), rules.right));
    CHECK(e.worst() <= 1e-9);
  }
}

TEST_CASE("Hermite data of symmetric systems are Hermitian") {
  const auto sys = generate_random_spd_system(10, 2, 2, 31, true);
  const auto rules = conjugate_pair(0.1, 10.0, 12);
  const auto ds = assemble_hermite(sample_system(sys, rules.right, true), sys.damping());
  CHECK(rel_diff(ds.Mq.adjoint(), ds.Mq) < 1e-12);
  CHECK(rel_diff(ds.Kq.adjoint(), ds.Kq) < 1e-12);
  CHECK(rel_diff(ds.Bq, ds.Cpq.adjoint()) < 1e-12);
}

TEST_CASE("Hermite assembly needs derivatives and Cv = 0") {
  const auto sys = generate_random_spd_system(5, 1, 1, 1);
  const auto rules = conjugate_pair(0.1, 10.0, 4);
  try {
    assemble_hermite(sample_system(position_only(sys), rules.right, false), sys.damping());
    FAIL("expected MissingDerivative");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingDerivative);
  }
  CHECK_THROWS_AS(assemble_hermite(sample_system(sys, rules.right, true), sys.damping()), Error);
}

TEST_CASE("J is unitary and the 2x2 pattern holds") {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix J(2, 2);
  J << r, cplx(0, -r), r, cplx(0, r);
  CHECK((J.adjoint() * J - CMatrix::Identity(2, 2)).norm() < 1e-15);

  // One left pair, one right pair, scalar blocks [[a, b], [conj b, conj a]].
  const cplx a(0.3, -1.2), b(-0.7, 0.4);
  LoewnerDataSet ds;
  ds.m = ds.p = 1;
  ds.Mq.resize(2, 2);
  ds.Mq << a, b, std::conj(b), std::conj(a);
  ds.Kq = ds.Mq;
  ds.Bq = CMatrix::Constant(2, 1, 1.0);
  ds.Cpq = CMatrix::Constant(1, 2, 1.0);
  ds.Cvq = CMatrix::Zero(1, 2);
  QuadratureRule q;
  q.freqs = {-1.0, 1.0};
  q.weights = {1.0, 1.0};
  QuadratureRule ql = q;
  ql.side = Side::Left;
  const auto out = realify(ds, ql, q, Rayleigh{});
  CHECK(out.realified);
  CHECK(rel_diff(out.Mq, J.adjoint() * ds.Mq * J) < 1e-15);
  CHECK(out.Mq.imag().norm() == 0.0);
  const CMatrix X = J.adjoint() * ds.Mq * J;
  CHECK(std::abs(X(0, 0).real() - (a + b).real()) < 1e-15);
  CHECK(std::abs(std::abs(X(0, 1).real()) - std::abs((a - b).imag())) < 1e-15);
}

TEST_CASE("realification is an isometry with negligible imaginary residual") {
  const auto sys = generate_random_spd_system(10, 2, 2, 21);
  const auto rules = interleave(0.1, 10.0, 10);
  const auto ds = assemble_general(sample_system(sys, rules.left), sample_system(sys, rules.right),
                                   sys.damping());
  const auto rd = realify(ds, rules.left, rules.right, sys.damping());
  CHECK(rd.realify_residual <= 1e-10);
  CHECK(std::abs(rd.Mq.norm() - ds.Mq.norm()) <= 1e-12 * ds.Mq.norm());
  CHECK(std::abs(rd.Kq.norm() - ds.Kq.norm()) <= 1e-12 * ds.Kq.norm());
  CHECK(std::abs(rd.Bq.norm() - ds.Bq.norm()) <= 1e-12 * ds.Bq.norm());
  CHECK(std::abs(rd.Cpq.norm() - ds.Cpq.norm()) <= 1e-12 * ds.Cpq.norm());
  CHECK(rd.Mq.imag().norm() == 0.0);
  CHECK(rd.Kq.imag().norm() == 0.0);
}

TEST_CASE("realify rejects structural damping and broken symmetry") {
  const auto sys = generate_random_spd_system(6, 1, 1, 2);
  const auto rules = interleave(0.1, 10.0, 4);
  auto ds = assemble_general(sample_system(sys, rules.left), sample_system(sys, rules.right),
                             sys.damping());
  try {
    realify(ds, rules.left, rules.right, Structural{0.01});
    FAIL("expected UnsupportedDamping");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDamping);
  }
  ds.Mq(0, 0) += cplx(0.0, 1.0) * ds.Mq.norm();
  try {
    realify(ds, rules.left, rules.right, sys.damping());
    FAIL("expected NotConjugateSymmetric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConjugateSymmetric);
  }
}

TEST_CASE("second-order Loewner pair") {
  const auto sys = unit_oscillator();
  const auto lr = single(2.0, Side::Left), rr = single(3.0, Side::Right);
  const auto ds = assemble_general(sample_system(sys, lr), sample_system(sys, rr), sys.damping());
  const auto pair = to_so_loewner(ds, lr, rr, sys.damping());
  CHECK(std::abs(pair.L(0, 0) + 1.0 / 24.0) < 1e-15);
  CHECK(std::abs(pair.Ls(0, 0) - 1.0 / 24.0) < 1e-15);
}

TEST_CASE("Loewner pair matches divided differences and round-trips") {
  const auto sys = position_only(generate_random_spd_system(6, 1, 1, 13));
  const DampingSpec d = Rayleigh{0.05, 0.02};
  const auto s2 = sys.with_damping(d);
  const auto rules = interleave(0.1, 10.0, 6);
  const auto left = sample_system(s2, rules.left);
  const auto right = sample_system(s2, rules.right);
  const auto ds = assemble_general(left, right, d);
  const auto pair = to_so_loewner(ds, rules.left, rules.right, d);
  for (std::size_t k = 0; k < left.size(); ++k) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      const auto& cl = left.coeffs[k];
      const auto& cr = right.coeffs[j];
      const cplx Gl = left.samples[k].G(0, 0), Gr = right.samples[j].G(0, 0);
      const cplx L = (cl.d * Gl - cr.d * Gr) / (cl.h - cr.h);
      const cplx Ls = (cl.n * Gl - cr.n * Gr) / (cl.h - cr.h);
      CHECK(std::abs(pair.L(k, j) - L) <= 1e-12 * std::abs(L));
      CHECK(std::abs(pair.Ls(k, j) - Ls) <= 1e-12 * std::abs(Ls));
    }
  }
  const auto [M2, K2] = from_so_loewner(pair, 1, 1, rules.left, rules.right, d);
  CHECK(rel_diff(M2, ds.Mq) < 1e-13);
  CHECK(rel_diff(K2, ds.Kq) < 1e-13);
  CHECK_THROWS_AS(to_so_loewner(ds, rules.left, rules.right, Structural{0.1}), Error);
}

TEST_CASE("sample sets report singular nodes") {
  const auto sys = unit_oscillator();
  QuadratureRule q;
  q.freqs = {2.0, -1.0};
  q.weights = {1.0, 1.0};
  try {
    sample_system(sys, q);
    FAIL("expected SingularPencilError");
  } catch (const SingularPencilError& e) {
    CHECK(e.node_index() == 1);
  }
}
