#include "soqbt/validate.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "soqbt/dampingfit.hpp"
#include "soqbt/errors.hpp"
#include "soqbt/generators.hpp"
#include "soqbt/gramians.hpp"
#include "soqbt/loewner.hpp"
#include "soqbt/reduction.hpp"

namespace soqbt {

namespace {

using Clock = std::chrono::steady_clock;

CMatrix random_complex(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  CMatrix A(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) A(i, j) = cplx(nd(rng), nd(rng));
  }
  return A;
}

RMatrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const RMatrix X = random_complex(rng, n, n).real();
  return X.transpose() * X + static_cast<double>(n) * RMatrix::Identity(n, n);
}

// Worst relative error of the five data matrices against the explicit
// products of the intrusive factors.
double oracle_error(const SecondOrderSystem& sys, const LoewnerDataSet& ds, const QuadFactors& qf) {
  const CMatrix& R = qf.Rp_check;
  const CMatrix& L = qf.Lv_check;
  const double e[] = {rel_diff(ds.Mq, L.adjoint() * sys.M() * R),
                      rel_diff(ds.Kq, L.adjoint() * sys.K() * R),
                      rel_diff(ds.Bq, L.adjoint() * sys.Bu()),
                      rel_diff(ds.Cpq, sys.Cp() * R),
                      rel_diff(ds.Cvq, sys.Cv() * R)};
  double worst = 0.0;
  for (double v : e) worst = std::max(worst, std::isnan(v) ? INFINITY : v);
  return worst;
}

CheckResult finish(CheckResult res, Clock::time_point t0) {
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

CheckResult check_general_oracle(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"general data formulas vs intrusive factors", false, 0.0, 1e-10, 0.0, {}};
  const auto sys = generate_random_spd_system(12, 2, 2, opts.seed);
  const auto rules = interleave(1e-1, 1e1, 8);
  const auto left = sample_system(sys, rules.left);
  const auto right = sample_system(sys, rules.right);
  auto ds = assemble_general(left, right, sys.damping());
  if (opts.inject_fault) ds.Mq = -ds.Mq;
  const auto qf = quad_factors(sys, rules.left, rules.right);
  res.value = oracle_error(sys, ds, qf);
  res.passed = res.value <= res.tolerance;
  res.detail = "max rel error " + sci(res.value);
  return finish(res, t0);
}

CheckResult check_hermite_oracle(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"Hermite data formulas vs intrusive factors", false, 0.0, 1e-9, 0.0, {}};
  const auto base = generate_random_spd_system(12, 2, 2, opts.seed + 1);
  const SecondOrderSystem sys(base.M(), base.K(), base.damping(), base.Bu(), base.Cp(),
                              CMatrix::Zero(2, 12));
  const auto rules = conjugate_pair(1e-1, 1e1, 8);
  const auto samples = sample_system(sys, rules.right, true);
  auto ds = assemble_hermite(samples, sys.damping());
  if (opts.inject_fault) ds.Mq = -ds.Mq;
  const auto qf = quad_factors(sys, hermite_left_rule(rules.right), rules.right);
  res.value = oracle_error(sys, ds, qf);
  res.passed = res.value <= res.tolerance;
  res.detail = "max rel error " + sci(res.value);
  return finish(res, t0);
}

CheckResult check_resolvent_identities(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"resolvent identities", false, 0.0, 1e-12, 0.0, {}};
  std::mt19937_64 rng(opts.seed + 2);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CMatrix X = random_complex(rng, 6, 6);
    const CMatrix Y = random_complex(rng, 6, 6);
    const CMatrix sz = random_complex(rng, 2, 1);
    const auto r = resolvent_identity_residuals(X, Y, sz(0), sz(1));
    worst = std::max({worst, r.first, r.second});
  }
  res.value = worst;
  res.passed = worst <= res.tolerance;
  res.detail = "max residual " + sci(worst) + " over 50 instances";
  return finish(res, t0);
}

CheckResult check_fit_gradients(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"damping-fit gradients vs central differences", false, 0.0, 1e-6, 0.0, {}};
  std::mt19937_64 rng(opts.seed + 3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (auto model : {DampingModel::Rayleigh, DampingModel::Structural}) {
    for (int trial = 0; trial < 20; ++trial) {
      DampingFitProblem pb;
      pb.model = model;
      const Eigen::Index r = 4;
      pb.Mt = random_spd(rng, r).cast<cplx>();
      pb.Kt = random_spd(rng, r).cast<cplx>();
      pb.Bt = random_complex(rng, r, 2);
      pb.Cpt = random_complex(rng, 2, r);
      pb.Cvt = random_complex(rng, 2, r);
      for (int k = 0; k < 8; ++k) {
        pb.nodes.push_back(cplx(0.0, std::pow(10.0, -1.0 + 2.0 * ud(rng))));
        pb.data.push_back(random_complex(rng, 2, 2));
      }
      RVector x(static_cast<Eigen::Index>(pb.parameter_count()));
      if (model == DampingModel::Rayleigh) {
        x << 0.01 + 0.5 * ud(rng), 0.001 + 0.1 * ud(rng);
      } else {
        x << 0.01 + 0.5 * ud(rng);
      }
      const RVector ga = fit_gradient(pb, x);
      RVector gf(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
        RVector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        gf(i) = (fit_cost(pb, xp) - fit_cost(pb, xm)) / (2.0 * h);
      }
      worst = std::max(worst, (ga - gf).norm() / std::max(ga.norm(), 1e-300));
    }
  }
  res.value = worst;
  res.passed = worst <= res.tolerance;
  res.detail = "max rel deviation " + sci(worst) + " over 40 problems";
  return finish(res, t0);
}

CheckResult check_stability_preservation(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"stability of Hermite ROMs for symmetric SPD systems", false, 0.0, 0.0, 0.0, {}};
  int unstable = 0, total = 0;
  double worst_re = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const auto sys = generate_random_spd_system(30, 1, 1, opts.seed + 100 + i, true);
    const auto rules = conjugate_pair(1e-2, 1e2, 60);
    const auto samples = sample_system(sys, rules.right, true);
    const auto ds = assemble_hermite(samples, sys.damping());
    for (Eigen::Index r = 2; r <= 10; ++r) {
      const auto rom = soquadpvbt(ds, r, sys.damping()).rom;
      const auto st = check_stability(rom);
      ++total;
      worst_re = std::max(worst_re, st.max_real_part);
      if (!st.stable) ++unstable;
    }
  }
  res.value = unstable;
  res.passed = unstable == 0;
  res.detail = std::to_string(total - unstable) + "/" + std::to_string(total) +
               " stable, largest real part " + sci(worst_re);
  return finish(res, t0);
}

CheckResult check_realification(const ValidateOptions& opts) {
  const auto t0 = Clock::now();
  CheckResult res{"realified vs complex pipeline", false, 0.0, 1e-8, 0.0, {}};
  const auto sys = generate_random_spd_system(20, 2, 2, opts.seed + 4);
  const auto rules = interleave(1e-1, 1e1, 20);
  const auto left = sample_system(sys, rules.left);
  const auto right = sample_system(sys, rules.right);
  const auto ds = assemble_general(left, right, sys.damping());

  LoewnerDataSet real_ds;
  try {
    real_ds = realify(ds, rules.left, rules.right, sys.damping());
  } catch (const Error& e) {
    res.value = INFINITY;
    res.detail = e.what();
    return finish(res, t0);
  }
  const double imag_resid = real_ds.realify_residual;

  const Eigen::Index r = 8;
  const auto rom_c = soquadpvbt(ds, r, sys.damping()).rom;
  const auto rom_r = soquadpvbt(real_ds, r, sys.damping()).rom;
  const bool real_rom = rom_r.Kt.imag().isZero(0.0) && rom_r.But.imag().isZero(0.0) &&
                        rom_r.Cpt.imag().isZero(0.0) && rom_r.Cvt.imag().isZero(0.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double w = std::pow(10.0, -1.0 + 2.0 * (k + 0.5) / 50.0);
    const CMatrix Gc = rom_transfer(rom_c, cplx(0.0, w));
    const CMatrix Gr = rom_transfer(rom_r, cplx(0.0, w));
    worst = std::max(worst, rel_diff(Gr, Gc));
  }
  res.value = worst;
  res.passed = worst <= res.tolerance && imag_resid <= 1e-10 && real_rom;
  res.detail = "max transfer deviation " + sci(worst) + ", imaginary residual " +
               sci(imag_resid) + ", real ROM " +
               (real_rom ? "yes" : "no");
  return finish(res, t0);
}

std::vector<CheckResult> run_validation(const ValidateOptions& opts) {
  using Fn = CheckResult (*)(const ValidateOptions&);
  const Fn checks[] = {check_general_oracle,       check_hermite_oracle,
                       check_resolvent_identities, check_fit_gradients,
                       check_stability_preservation, check_realification};
  std::vector<CheckResult> out;
  for (Fn fn : checks) {
    try {
      out.push_back(fn(opts));
    } catch (const std::exception& e) {
      CheckResult res;
      res.name = "check aborted";
      res.detail = e.what();
      out.push_back(res);
    }
  }
  return out;
}

}  // namespace soqbt
