#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "soqbt/errors.hpp"
#include "soqbt/generators.hpp"
#include "soqbt/gramians.hpp"

using namespace soqbt;

namespace {

CMatrix scalar(cplx v) { return CMatrix::Constant(1, 1, v); }

CMatrix random_complex(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  CMatrix A(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) A(i, j) = cplx(nd(rng), nd(rng));
  return A;
}

double min_hermitian_eig(const CMatrix& A) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(A).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("quad factor of the scalar oscillator") {
  const SecondOrderSystem sys(scalar(1), scalar(1), Rayleigh{}, scalar(1), scalar(1), scalar(0));
  QuadratureRule right, left;
  right.freqs = {3.0};
  right.weights = {1.0};
  left.side = Side::Left;
  left.freqs = {2.0};
  left.weights = {1.0};
  const auto qf = quad_factors(sys, left, right);
  CHECK(std::abs(qf.Rp_check(0, 0) - cplx(-1.0 / 8.0)) < 1e-15);
  CHECK(std::abs(qf.Lv_check(0, 0) - cplx(-1.0 / 3.0)) < 1e-15);
}

TEST_CASE("quad factor blocks match their definition") {
  const auto sys = generate_random_spd_system(6, 2, 3, 4);
  const auto rules = interleave(0.1, 10.0, 6);
  const auto qf = quad_factors(sys, rules.left, rules.right);
  CHECK(qf.Rp_check.rows() == 6);
  CHECK(qf.Rp_check.cols() == 2 * 6);
  CHECK(qf.Lv_check.cols() == 3 * 6);
  for (std::size_t j = 0; j < rules.right.size(); ++j) {
    const cplx s = rules.right.node(j);
    const CMatrix expect = rules.right.weights[j] * eval_pencil(sys, s).inverse() * sys.Bu();
    CHECK(rel_diff(qf.Rp_check.middleCols(2 * j, 2), expect) < 1e-12);
  }
  for (std::size_t k = 0; k < rules.left.size(); ++k) {
    const cplx s = rules.left.node(k);
    const CMatrix row = rules.left.weights[k] * (sys.Cp() + s * sys.Cv()) * eval_pencil(sys, s).inverse();
    CHECK(rel_diff(qf.Lv_check.middleCols(3 * k, 3), row.adjoint()) < 1e-12);
  }
  const CMatrix P = qf.Rp_check * qf.Rp_check.adjoint();
  CHECK(rel_diff(P, P.adjoint()) < 1e-15);
  CHECK(min_hermitian_eig(P) > -1e-12 * P.norm());
}

TEST_CASE("singular pencil in quad_factors reports the node") {
  const SecondOrderSystem sys(scalar(1), scalar(1), Rayleigh{}, scalar(1), scalar(1), scalar(0));
  QuadratureRule right, left;
  right.freqs = {3.0, 1.0};
  right.weights = {1.0, 1.0};
  left.side = Side::Left;
  left.freqs = {2.0};
  left.weights = {1.0};
  try {
    quad_factors(sys, left, right);
    FAIL("expected SingularPencilError");
  } catch (const SingularPencilError& e) {
    CHECK(e.node_index() == 1);
  }
}

TEST_CASE("exact Gramians of the damped scalar oscillator") {
  Generalized d{[](cplx) { return cplx(0.5); }, [](cplx) { return cplx(0.0); }, nullptr, nullptr,
                true};
  const SecondOrderSystem sys(scalar(1), scalar(1), d, scalar(1), scalar(1), scalar(0));
  const auto g = exact_gramians(sys);
  REQUIRE(g.exact);
  const auto fo = companion_form(sys);
  const CMatrix resP = fo.A * g.P * fo.E.adjoint() + fo.E * g.P * fo.A.adjoint() + fo.B * fo.B.adjoint();
  CHECK(resP.norm() <= 1e-10 * g.P.norm());
  const CMatrix resQ = fo.A.adjoint() * g.Q * fo.E + fo.E.adjoint() * g.Q * fo.A + fo.C.adjoint() * fo.C;
  CHECK(resQ.norm() <= 1e-10 * g.Q.norm());
  CHECK(min_hermitian_eig(g.P) >= -1e-12);
  CHECK(min_hermitian_eig(g.Q) >= -1e-12);
  CHECK(rel_diff(g.R * g.R.adjoint(), g.P) < 1e-10);
  CHECK(rel_diff(g.L * g.L.adjoint(), g.Q) < 1e-10);
  // Pp = 1 / (2 c k) for x'' + c x' + k x = u.
  CHECK(std::abs(g.P(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("scalar Pp equals a fine trapezoid integral") {
  Generalized d{[](cplx) { return cplx(0.3); }, [](cplx) { return cplx(0.0); }, nullptr, nullptr,
                true};
  const SecondOrderSystem sys(scalar(1), scalar(2), d, scalar(1), scalar(1), scalar(0));
  const auto g = exact_gramians(sys);
  // Integral of |1 / (2 - w^2 + 0.3 i w)|^2 over the real line, divided by 2 pi.
  const int n = 100000;
  const double L = 400.0, h = 2 * L / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = -L + i * h;
    const double v = std::norm(1.0 / cplx(2.0 - w * w, 0.3 * w));
    acc += (i == 0 || i == n) ? 0.5 * v : v;
  }
  const double Pp = acc * h / (2 * kPi);
  CHECK(std::abs(g.P(0, 0).real() - Pp) < 1e-6 * Pp);
  CHECK(std::abs(g.P(0, 0).real() - 1.0 / (2 * 0.3 * 2.0)) < 1e-12);
}

TEST_CASE("Lyapunov residuals on random stable systems") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sys = generate_random_spd_system(8, 2, 2, seed);
    const auto g = exact_gramians(sys);
    const auto fo = companion_form(sys);
    const CMatrix resP = fo.A * g.P * fo.E.adjoint() + fo.E * g.P * fo.A.adjoint() + fo.B * fo.B.adjoint();
    const CMatrix resQ = fo.A.adjoint() * g.Q * fo.E + fo.E.adjoint() * g.Q * fo.A + fo.C.adjoint() * fo.C;
    CHECK(resP.norm() <= 1e-10 * g.P.norm());
    CHECK(resQ.norm() <= 1e-10 * g.Q.norm());
    CHECK(rel_diff(g.Rp * g.Rp.adjoint(), g.P.topLeftCorner(8, 8)) < 1e-10);
    CHECK(rel_diff(g.Lv * g.Lv.adjoint(), g.Q.bottomRightCorner(8, 8)) < 1e-10);
  }
}

TEST_CASE("symmetric systems have Pp = Qv") {
  const auto sys = generate_random_spd_system(10, 2, 2, 77, true);
  const auto g = exact_gramians(sys);
  const CMatrix Pp = g.P.topLeftCorner(10, 10);
  const CMatrix Qv = g.Q.bottomRightCorner(10, 10);
  CHECK(rel_diff(Qv, Pp) < 1e-8);
  const auto blocks = pv_blocks(g, sys);
  CHECK(rel_diff(blocks.Pp, Pp) < 1e-15);
  CHECK(rel_diff(blocks.MQvM, sys.M().adjoint() * Qv * sys.M()) < 1e-12);
  CHECK(min_hermitian_eig(blocks.Pp) > -1e-12 * blocks.Pp.norm());
  CHECK(min_hermitian_eig(blocks.MQvM) > -1e-12 * blocks.MQvM.norm());
}

TEST_CASE("quadrature Pp converges to the exact block") {
  MsdParams prm;
  prm.alpha = 0.2;
  prm.beta = 0.2;
  const auto sys = generate_msd_chain(3, prm);
  const auto g = exact_gramians(sys);
  const CMatrix Pp = g.P.topLeftCorner(sys.n(), sys.n());
  double prev_diff = INFINITY;
  double err = INFINITY;
  CMatrix prev;
  for (int N : {200, 400, 800, 1600}) {
    const auto rule = exp_trapezoid(1e-4, 1e3, N);
    const auto qf = quad_factors(sys, rule.negated(Side::Left), rule);
    const CMatrix Pq = qf.Rp_check * qf.Rp_check.adjoint();
    // Truncating the frequency axis leaves a floor near 1e-4.
    err = rel_diff(Pq, Pp);
    if (prev.size()) {
      const double diff = (Pq - prev).norm();
      CHECK(diff < prev_diff);
      prev_diff = diff;
    }
    prev = Pq;
  }
  CHECK(err < 1e-2);
}

TEST_CASE("exact Gramians reject unstable and frequency-dependent models") {
  const SecondOrderSystem undamped(scalar(1), scalar(1), Rayleigh{}, scalar(1), scalar(1), scalar(0));
  try {
    exact_gramians(undamped);
    FAIL("expected UnstablePencil");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnstablePencil);
  }
  try {
    exact_gramians(generate_structural_chain(3, 0.01));
    FAIL("expected UnsupportedDamping");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDamping);
  }
}

TEST_CASE("fine-quadrature fallback for structural damping") {
  const auto sys = generate_structural_chain(4, 0.05);
  const auto g = gramian_factors(sys);
  CHECK_FALSE(g.exact);
  CHECK(g.P.size() == 0);
  CHECK(g.Rp.rows() == 4);
  CHECK(g.Lv.rows() == 4);
  const CMatrix Pp = g.Rp * g.Rp.adjoint();
  CHECK(min_hermitian_eig(Pp) > -1e-12 * Pp.norm());

  // On a Rayleigh system the fallback reproduces the exact blocks.
  const auto ray = generate_random_spd_system(5, 1, 1, 3);
  const auto ex = exact_gramians(ray);
  const auto fq = fine_quadrature_gramians(ray);
  CHECK(rel_diff(fq.Rp * fq.Rp.adjoint(), ex.Rp * ex.Rp.adjoint()) < 1e-3);
  CHECK(rel_diff(fq.Lv * fq.Lv.adjoint(), ex.Lv * ex.Lv.adjoint()) < 1e-3);
}

TEST_CASE("psd_factor") {
  std::mt19937_64 rng(5);
  const CMatrix X = random_complex(rng, 6, 3);
  const CMatrix G = X * X.adjoint();
  const CMatrix F = psd_factor(G);
  CHECK(rel_diff(F * F.adjoint(), G) < 1e-12);
}

TEST_CASE("resolvent identities on random instances") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CMatrix X = random_complex(rng, 6, 6);
    const CMatrix Y = random_complex(rng, 6, 6);
    const CMatrix sz = random_complex(rng, 2, 1);
    const auto r = resolvent_identity_residuals(X, Y, sz(0), sz(1));
    worst = std::max({worst, r.first, r.second});
  }
  CHECK(worst <= 1e-12);
}
