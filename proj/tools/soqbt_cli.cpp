#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "soqbt/dampingfit.hpp"
#include "soqbt/errors.hpp"
#include "soqbt/generators.hpp"
#include "soqbt/io.hpp"
#include "soqbt/metrics.hpp"
#include "soqbt/parallel.hpp"
#include "soqbt/reduction.hpp"
#include "soqbt/validate.hpp"

using namespace soqbt;

namespace {

enum Exit : int {
  kOk = 0,
  kInvariant = 1,
  kParams = 2,
  kEvaluation = 3,
  kHypothesis = 4,
  kRank = 5,
  kOptimizer = 6,
  kFormat = 7,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams:
    case ErrorKind::InvalidRange:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::UnsupportedDamping:
    case ErrorKind::DomainError:
    case ErrorKind::ZeroWeight:
      return kParams;
    case ErrorKind::SingularPencil:
    case ErrorKind::DivisionByZero:
    case ErrorKind::UnstablePencil:
    case ErrorKind::IllConditionedEigenvectors:
    case ErrorKind::SingularReducedPencil:
    case ErrorKind::ZeroReference:
      return kEvaluation;
    case ErrorKind::HypothesisViolation:
    case ErrorKind::MissingSplitSamples:
    case ErrorKind::MissingDerivative:
    case ErrorKind::NotConjugateSymmetric:
      return kHypothesis;
    case ErrorKind::RankDeficient:
      return kRank;
    case ErrorKind::FormatError:
    case ErrorKind::VersionMismatch:
      return kFormat;
  }
  return kParams;
}

// Writes to `path`, or stdout for "-".
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

std::string fmt(double v) { return io::format_double(v); }

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string out = "-";
  int d = 100;
  MsdParams msd;
  int n = 30, m = 1, p = 1;
  std::uint64_t seed = 1;
  bool symmetric = false;
  int chain_n = 10;
  double eta = 1e-3;
};

void add_generate(CLI::App& app, GenerateArgs& a, std::function<int()>& run) {
  auto* gen = app.add_subcommand("generate", "Write a benchmark system file");
  gen->require_subcommand(1);

  auto* msd = gen->add_subcommand("msd", "Three-row mass-spring-damper network, n = 3d + 1");
  msd->add_option("--d", a.d, "Masses per row")->check(CLI::PositiveNumber);
  msd->add_option("--alpha", a.msd.alpha, "Rayleigh mass coefficient");
  msd->add_option("--beta", a.msd.beta, "Rayleigh stiffness coefficient");
  msd->add_option("--row-mass", a.msd.row_mass);
  msd->add_option("--coupling-mass", a.msd.coupling_mass);
  msd->add_option("--row-stiffness", a.msd.row_stiffness);
  msd->add_option("--coupling-stiffness", a.msd.coupling_stiffness);
  msd->add_option("--anchor-stiffness", a.msd.anchor_stiffness);
  msd->add_option("-o,--output", a.out, "Output path, - for stdout");
  msd->callback([&] {
    run = [&] {
      emit(a.out, io::system_to_string(generate_msd_chain(a.d, a.msd)));
      return int{kOk};
    };
  });

  auto* rnd = gen->add_subcommand("random-spd", "Seeded SPD system with Rayleigh damping");
  rnd->add_option("--n", a.n)->check(CLI::PositiveNumber);
  rnd->add_option("--m", a.m)->check(CLI::PositiveNumber);
  rnd->add_option("--p", a.p)->check(CLI::PositiveNumber);
  rnd->add_option("--seed", a.seed);
  rnd->add_flag("--symmetric", a.symmetric, "Bu = Cp^T and Cv = 0");
  rnd->add_option("-o,--output", a.out, "Output path, - for stdout");
  rnd->callback([&] {
    run = [&] {
      emit(a.out, io::system_to_string(
                      generate_random_spd_system(a.n, a.m, a.p, a.seed, a.symmetric)));
      return int{kOk};
    };
  });

  auto* st = gen->add_subcommand("structural-chain", "Unit-mass chain with structural damping");
  st->add_option("--n", a.chain_n);
  st->add_option("--eta", a.eta);
  st->add_option("-o,--output", a.out, "Output path, - for stdout");
  st->callback([&] {
    run = [&] {
      emit(a.out, io::system_to_string(generate_structural_chain(a.chain_n, a.eta)));
      return int{kOk};
    };
  });
}

// ---- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string system, out = "-";
  double wmin = 1e-3, wmax = 1e1;
  int N = 200;
  bool hermite = false;
};

int run_sample(const SampleArgs& a) {
  const auto sys = io::read_system(a.system);
  io::SampleFile file;
  file.damping = sys.damping();
  if (a.hermite) {
    file.mode = AssemblyMode::Hermite;
    file.right = sample_system(sys, conjugate_pair(a.wmin, a.wmax, a.N).right, true);
  } else {
    file.mode = AssemblyMode::General;
    const auto rules = interleave(a.wmin, a.wmax, a.N);
    file.left = sample_system(sys, rules.left);
    file.right = sample_system(sys, rules.right);
  }
  emit(a.out, io::samples_to_string(file));
  std::cerr << "sampled " << (file.left ? file.left->size() : 0) << " left + "
            << file.right.size() << " right nodes\n";
  return kOk;
}

// ---- reduce -----------------------------------------------------------------

struct ReduceArgs {
  std::string samples, out = "-", sv_csv;
  long r = 10;
  bool realify = false;
};

LoewnerDataSet assemble_from_file(const io::SampleFile& file) {
  if (file.mode == AssemblyMode::Hermite) return assemble_hermite(file.right, file.damping);
  return assemble_general(*file.left, file.right, file.damping);
}

QuadratureRule left_rule_of(const io::SampleFile& file) {
  return file.mode == AssemblyMode::Hermite ? hermite_left_rule(file.right.rule)
                                            : file.left->rule;
}

int run_reduce(const ReduceArgs& a) {
  const auto file = io::read_samples(a.samples);
  auto ds = assemble_from_file(file);
  if (a.realify) ds = realify(ds, left_rule_of(file), file.right.rule, file.damping);
  const auto res = soquadpvbt(ds, a.r, file.damping);
  emit(a.out, io::rom_to_string(res.rom));

  const auto profile = singular_value_profile(ds);
  if (!a.sv_csv.empty()) {
    io::CsvTable t({"index", "sigma", "sigma_rel"});
    const double s0 = profile.singular_values.empty() ? 1.0 : profile.singular_values[0];
    for (std::size_t i = 0; i < profile.singular_values.size(); ++i) {
      t.add_row({static_cast<double>(i + 1), profile.singular_values[i],
                 profile.singular_values[i] / s0});
    }
    io::write_text(a.sv_csv, t.str());
  }
  double max_imag = 0.0;
  for (const CMatrix* X : {&res.rom.Kt, &res.rom.But, &res.rom.Cpt, &res.rom.Cvt}) {
    if (X->size()) max_imag = std::max(max_imag, X->imag().cwiseAbs().maxCoeff());
  }
  std::cerr << "order " << res.report.r_used << ", numerical rank " << profile.r_used
            << ", sigma_(r+1)/sigma_1 " << fmt(res.report.discarded_mass)
            << ", realified " << (ds.realified ? "yes" : "no");
  if (ds.realified) std::cerr << " (imaginary residual " << fmt(ds.realify_residual) << ")";
  std::cerr << ", max |imag| in ROM " << fmt(max_imag) << "\n";
  return kOk;
}

// ---- fit-damping ------------------------------------------------------------

struct FitArgs {
  std::string rom, samples, out = "-", trace;
  std::string model = "rayleigh";
  std::vector<double> init;
  FitOptions opts;
};

std::vector<TransferSample> all_samples(const io::SampleFile& file) {
  std::vector<TransferSample> out;
  if (file.left) out.insert(out.end(), file.left->samples.begin(), file.left->samples.end());
  out.insert(out.end(), file.right.samples.begin(), file.right.samples.end());
  return out;
}

int run_fit(const FitArgs& a) {
  const auto rom = io::read_rom(a.rom);
  const auto file = io::read_samples(a.samples);
  const DampingModel model =
      a.model == "structural" ? DampingModel::Structural : DampingModel::Rayleigh;
  const auto pb = make_fit_problem(rom, all_samples(file), model);
  if (a.init.size() != pb.parameter_count()) {
    std::cerr << "error: --init needs " << pb.parameter_count() << " value(s) for " << a.model
              << "\n";
    return kParams;
  }
  const RVector init = Eigen::Map<const RVector>(a.init.data(), static_cast<Eigen::Index>(a.init.size()));
  double init_cost;
  try {
    init_cost = fit_cost(pb, init);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOptimizer;
  }
  if (!std::isfinite(init_cost)) {
    std::cerr << "error: cost is not finite at the initial point\n";
    return kOptimizer;
  }
  const auto res = fit_damping(pb, init, a.opts);
  ReducedSecondOrderModel fitted;
  try {
    fitted = with_fitted_damping(rom, model, res.params);
  } catch (const Error& e) {
    std::cerr << "error: fitted parameters are not a valid damping model: " << e.what() << "\n";
    return kOptimizer;
  }
  emit(a.out, io::rom_to_string(fitted));

  if (!a.trace.empty()) {
    std::vector<std::string> header{"iteration"};
    if (model == DampingModel::Rayleigh) {
      header.insert(header.end(), {"alpha", "beta"});
    } else {
      header.push_back("eta");
    }
    header.push_back("cost");
    io::CsvTable t(header);
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      std::vector<double> row{static_cast<double>(i)};
      for (Eigen::Index k = 0; k < res.trace[i].params.size(); ++k) {
        row.push_back(res.trace[i].params(k));
      }
      row.push_back(res.trace[i].cost);
      t.add_row(row);
    }
    io::write_text(a.trace, t.str());
  }
  std::cerr << "params";
  for (Eigen::Index k = 0; k < res.params.size(); ++k) std::cerr << " " << fmt(res.params(k));
  std::cerr << "\ncost " << fmt(res.final_cost) << " (init " << fmt(init_cost) << ")"
            << "\ngrad_norm " << fmt(res.grad_norm) << "\niterations " << res.iterations
            << "\nstop " << to_string(res.stop) << "\n";
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string rom, system, samples, ref_rom, csv;
  double wmin = 1e-3, wmax = 1e1;
  int points = 500;
  bool stability = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto rom = io::read_rom(a.rom);
  const TransferMap test = [&](cplx s) { return rom_transfer(rom, s); };

  std::vector<double> omegas;
  std::vector<CMatrix> ref;
  if (!a.samples.empty()) {
    const auto file = io::read_samples(a.samples);
    std::set<double> seen;
    std::vector<std::pair<double, CMatrix>> pts;
    for (const auto& smp : all_samples(file)) {
      const double w = smp.node.imag();
      if (w > 0.0 && seen.insert(w).second) pts.emplace_back(w, smp.G);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [w, G] : pts) {
      omegas.push_back(w);
      ref.push_back(std::move(G));
    }
  } else {
    const auto grid = FrequencyGrid::log(a.wmin, a.wmax, a.points);
    omegas = grid.omegas;
    if (!a.system.empty()) {
      const auto sys = io::read_system(a.system);
      ref = sample_map([&](cplx s) { return eval_transfer(sys, s); }, grid);
    } else {
      const auto other = io::read_rom(a.ref_rom);
      ref = sample_map([&](cplx s) { return rom_transfer(other, s); }, grid);
    }
  }
  FrequencyGrid grid{omegas, Spacing::Log};
  const auto tst = sample_map(test, grid);
  const auto rel = pointwise_relerr(ref, tst);
  const double hinf = relerr_hinf(ref, tst);
  const double h2 = relerr_h2(ref, tst);

  if (!a.csv.empty()) {
    const auto p = ref[0].rows(), m = ref[0].cols();
    std::vector<std::string> header{"omega", "norm_ref", "norm_test", "relerr"};
    if (p == 1 && m == 1) header.insert(header.end(), {"ref_re", "ref_im", "test_re", "test_im"});
    io::CsvTable t(header);
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      std::vector<double> row{omegas[k], spectral_norm(ref[k]), spectral_norm(tst[k]), rel[k]};
      if (p == 1 && m == 1) {
        row.insert(row.end(), {ref[k](0, 0).real(), ref[k](0, 0).imag(), tst[k](0, 0).real(),
                               tst[k](0, 0).imag()});
      }
      t.add_row(row);
    }
    emit(a.csv, t.str());
  }
  std::ostream& os = a.csv == "-" ? std::cerr : std::cout;
  os << "points " << omegas.size() << "\nrelerr_hinf " << fmt(hinf) << "\nrelerr_h2 " << fmt(h2)
     << "\n";
  if (a.stability) {
    const auto st = check_stability(rom);
    os << "stable=" << (st.stable ? "true" : "false") << " max_real_part "
       << fmt(st.max_real_part) << "\n";
  }
  return kOk;
}

// ---- validate ---------------------------------------------------------------

struct ValidateArgs {
  ValidateOptions opts;
  bool json = false;
};

int run_validate(const ValidateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_validation(a.opts);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  if (a.json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : results) {
      doc.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value},
                     {"tolerance", r.tolerance}, {"seconds", r.seconds}, {"detail", r.detail}});
    }
    std::cout << doc.dump(1) << "\n";
  } else {
    std::cout << "status\tseconds\tcheck\tdetail\n";
    for (const auto& r : results) {
      std::ostringstream sec;
      sec.precision(3);
      sec << std::fixed << r.seconds;
      std::cout << (r.passed ? "PASS" : "FAIL") << '\t' << sec.str() << '\t' << r.name << '\t'
                << r.detail << "\n";
    }
    std::cout << (all ? "all checks passed" : "some checks failed") << " in " << total << " s\n";
  }
  return all ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven second-order balanced truncation"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker cap for node-wise loops (env SOQBT_THREADS)");

  std::function<int()> run;

  GenerateArgs gen;
  add_generate(app, gen, run);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample a system on quadrature nodes");
  sample->add_option("-s,--system", sa.system, "System file")->required();
  sample->add_option("--wmin", sa.wmin, "Lower frequency bound (rad/s)");
  sample->add_option("--wmax", sa.wmax, "Upper frequency bound (rad/s)");
  sample->add_option("--n", sa.N, "Nodes per rule (even)");
  sample->add_flag("--hermite", sa.hermite, "Conjugate-pair rule with derivative samples");
  sample->add_option("-o,--output", sa.out, "Output path, - for stdout");
  sample->callback([&] { run = [&] { return run_sample(sa); }; });

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Build a reduced model from samples");
  reduce->add_option("-i,--samples", ra.samples, "Sample-set file")->required();
  reduce->add_option("-r,--order", ra.r, "Reduced order")->required();
  reduce->add_flag("--realify", ra.realify, "Transform the data to real arithmetic first");
  reduce->add_option("-o,--output", ra.out, "ROM output path, - for stdout");
  reduce->add_option("--sv-csv", ra.sv_csv, "Write the singular-value profile as CSV");
  reduce->callback([&] { run = [&] { return run_reduce(ra); }; });

  FitArgs fa;
  auto* fit = app.add_subcommand("fit-damping", "Fit damping coefficients of a ROM to samples");
  fit->add_option("--rom", fa.rom, "ROM file")->required();
  fit->add_option("--samples", fa.samples, "Sample-set file")->required();
  fit->add_option("--model", fa.model, "rayleigh | structural")
      ->check(CLI::IsMember({"rayleigh", "structural"}));
  fit->add_option("--init", fa.init, "Initial parameters, comma separated")
      ->delimiter(',')
      ->required();
  fit->add_option("--grad-tol", fa.opts.grad_tol);
  fit->add_option("--step-tol", fa.opts.step_tol);
  fit->add_option("--max-iter", fa.opts.max_iter);
  fit->add_option("-o,--output", fa.out, "Updated ROM path, - for stdout");
  fit->add_option("--trace", fa.trace, "Cost trace CSV");
  fit->callback([&] { run = [&] { return run_fit(fa); }; });

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Compare a ROM with a reference on a frequency grid");
  ev->add_option("--rom", ea.rom, "ROM file")->required();
  auto* ref_sys = ev->add_option("--system", ea.system, "Reference system file");
  auto* ref_smp = ev->add_option("--samples", ea.samples, "Reference sample-set file");
  auto* ref_rom = ev->add_option("--reference-rom", ea.ref_rom, "Reference ROM file");
  ref_sys->excludes(ref_smp)->excludes(ref_rom);
  ref_smp->excludes(ref_rom);
  ev->add_option("--wmin", ea.wmin);
  ev->add_option("--wmax", ea.wmax);
  ev->add_option("--points", ea.points);
  ev->add_option("--csv", ea.csv, "Per-frequency CSV path, - for stdout");
  ev->add_flag("--stability", ea.stability, "Report ROM stability");
  ev->callback([&] {
    run = [&] {
      if (ea.system.empty() && ea.samples.empty() && ea.ref_rom.empty()) {
        std::cerr << "error: one of --system, --samples, --reference-rom is required\n";
        return int{kParams};
      }
      return run_evaluate(ea);
    };
  });

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Run the built-in invariant battery");
  val->add_option("--seed", va.opts.seed);
  val->add_flag("--inject-fault", va.opts.inject_fault, "Negative control: corrupt Mq");
  val->add_flag("--json", va.json, "Machine-readable output");
  val->callback([&] { run = [&] { return run_validate(va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParams;
  }
  if (threads > 0) set_thread_count(threads);
  if (!run) return kParams;

  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParams;
  }
}
