#include "soqbt/loewner.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "soqbt/errors.hpp"
#include "soqbt/parallel.hpp"

namespace soqbt {

namespace {

constexpr double kRealifyTol = 1e-10;

[[noreturn]] void throw_report(const HypothesisReport& report) {
  throw Error(ErrorKind::HypothesisViolation,
              std::to_string(report.violations.size()) + " violation(s)\n" + report.summary());
}

// Right-sample bracket parts (Gp, Gv) at node j.
std::pair<CMatrix, CMatrix> split_parts(const SampleSet& set, std::size_t j) {
  const auto& smp = set.samples[j];
  if (smp.Gp && smp.Gv) return {*smp.Gp, *smp.Gv};
  if (set.zero_velocity_output) return {smp.G, CMatrix::Zero(smp.G.rows(), smp.G.cols())};
  throw Error(ErrorKind::MissingSplitSamples,
              "right sample " + std::to_string(j) + " lacks Gp/Gv and Cv = 0 is not declared");
}

std::vector<CoefficientEval> coefficients_at(const QuadratureRule& rule, const DampingSpec& damping,
                                             bool with_derivatives) {
  std::vector<CoefficientEval> out;
  out.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    out.push_back(eval_coefficients(damping, rule.node(i), with_derivatives));
  }
  return out;
}

// I (x) J_l with J_l = (1/sqrt 2) [[I, -iI], [I, iI]], one J per node pair.
CMatrix pair_transform(std::size_t nodes, Eigen::Index l) {
  const auto N = static_cast<Eigen::Index>(nodes);
  CMatrix T = CMatrix::Zero(N * l, N * l);
  const double c = 1.0 / std::sqrt(2.0);
  const CMatrix I = CMatrix::Identity(l, l);
  for (Eigen::Index q = 0; q < N / 2; ++q) {
    const Eigen::Index o = 2 * q * l;
    T.block(o, o, l, l) = c * I;
    T.block(o, o + l, l, l) = -kI * c * I;
    T.block(o + l, o, l, l) = c * I;
    T.block(o + l, o + l, l, l) = kI * c * I;
  }
  return T;
}

double imag_ratio(const CMatrix& X) {
  const double total = X.norm();
  return total == 0.0 ? 0.0 : X.imag().norm() / total;
}

void check_nonzero_weights(const QuadratureRule& rule) {
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (!(rule.weights[i] != 0.0)) {
      throw Error(ErrorKind::ZeroWeight, "weight " + std::to_string(i) + " is zero");
    }
  }
}

}  // namespace

void SampleSet::check() const {
  rule.check();
  if (samples.size() != rule.size()) {
    throw Error(ErrorKind::DimensionMismatch, "sample count differs from node count");
  }
  if (!coeffs.empty() && coeffs.size() != rule.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient count differs from node count");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].G.size() == 0 || samples[i].G.rows() != samples[0].G.rows() ||
        samples[i].G.cols() != samples[0].G.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "sample " + std::to_string(i) + " has wrong shape");
    }
    if (has_derivatives && !samples[i].G_prime) {
      throw Error(ErrorKind::MissingDerivative, "sample " + std::to_string(i) + " lacks G'");
    }
  }
}

SampleSet sample_system(const SecondOrderSystem& sys, const QuadratureRule& rule,
                        bool with_derivatives) {
  rule.check();
  SampleSet set;
  set.rule = rule;
  set.samples.resize(rule.size());
  set.has_derivatives = with_derivatives;
  set.zero_velocity_output = sys.Cv().isZero(0.0);
  parallel_for(rule.size(), [&](std::size_t j) {
    try {
      set.samples[j] = eval_sample(sys, rule.node(j), true, with_derivatives);
    } catch (const SingularPencilError& e) {
      throw SingularPencilError(std::string(e.what()) + " at node " + std::to_string(j),
                                static_cast<long>(j));
    }
  });
  set.coeffs = coefficients_at(rule, sys.damping(), with_derivatives);
  return set;
}

LoewnerDataSet assemble_general(const SampleSet& left, const SampleSet& right,
                                const DampingSpec& damping) {
  left.check();
  right.check();
  if (left.size() == 0 || right.size() == 0) {
    throw Error(ErrorKind::InvalidParams, "empty sample set");
  }
  const auto report = validate_for_general_assembly(left.rule, right.rule, damping);
  if (!report.ok()) throw_report(report);

  const Eigen::Index p = left.samples[0].G.rows();
  const Eigen::Index m = left.samples[0].G.cols();
  if (right.samples[0].G.rows() != p || right.samples[0].G.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "left and right samples differ in shape");
  }
  const auto K = static_cast<Eigen::Index>(left.size());
  const auto J = static_cast<Eigen::Index>(right.size());
  const auto cl = coefficients_at(left.rule, damping, false);
  const auto cr = coefficients_at(right.rule, damping, false);

  std::vector<CMatrix> Gp(J), Gv(J);
  for (Eigen::Index j = 0; j < J; ++j) std::tie(Gp[j], Gv[j]) = split_parts(right, j);

  LoewnerDataSet ds;
  ds.m = m;
  ds.p = p;
  ds.mode = AssemblyMode::General;
  ds.Mq.resize(p * K, m * J);
  ds.Kq.resize(p * K, m * J);
  ds.Bq.resize(p * K, m);
  ds.Cpq.resize(p, m * J);
  ds.Cvq.resize(p, m * J);

  for (Eigen::Index k = 0; k < K; ++k) {
    const double wk = left.rule.weights[k];
    const double theta = left.rule.freqs[k];
    const CMatrix& Gl = left.samples[k].G;
    ds.Bq.middleRows(k * p, p) = wk * Gl;
    for (Eigen::Index j = 0; j < J; ++j) {
      const double rj = right.rule.weights[j];
      const double zeta = right.rule.freqs[j];
      const CMatrix T = Gp[j] + (theta / zeta) * Gv[j];
      const cplx scale = wk * rj / (cl[k].d * cr[j].d);
      const cplx dh = cl[k].h - cr[j].h;
      ds.Mq.block(k * p, j * m, p, m) = (-scale / dh) * (cl[k].d * Gl - cr[j].d * T);
      ds.Kq.block(k * p, j * m, p, m) = (scale / dh) * (cl[k].n * Gl - cr[j].n * T);
    }
  }
  for (Eigen::Index j = 0; j < J; ++j) {
    const double rj = right.rule.weights[j];
    ds.Cpq.middleCols(j * m, m) = rj * Gp[j];
    ds.Cvq.middleCols(j * m, m) = (rj / right.rule.node(j)) * Gv[j];
  }
  return ds;
}

QuadratureRule hermite_left_rule(const QuadratureRule& right) { return right.negated(Side::Left); }

LoewnerDataSet assemble_hermite(const SampleSet& samples, const DampingSpec& damping) {
  samples.check();
  if (!samples.has_derivatives) {
    throw Error(ErrorKind::MissingDerivative, "Hermite assembly needs G' at every node");
  }
  const std::size_t N = samples.size();
  if (N == 0) throw Error(ErrorKind::InvalidParams, "empty sample set");
  for (std::size_t j = 0; j < N; ++j) {
    const auto& smp = samples.samples[j];
    const bool zero_v = samples.zero_velocity_output || (smp.Gv && smp.Gv->isZero(0.0));
    if (!zero_v) {
      throw Error(ErrorKind::HypothesisViolation, "Hermite assembly needs data with Cv = 0");
    }
  }
  const auto& rule = samples.rule;
  const auto left = hermite_left_rule(rule);

  // neg[k]: right index j with zeta_j = -zeta_k, i.e. the node where
  // the left node i theta_k = -i zeta_k was sampled.
  std::map<double, std::size_t> index_of;
  for (std::size_t j = 0; j < N; ++j) index_of.emplace(rule.freqs[j], j);
  std::vector<std::size_t> neg(N);
  HypothesisReport report;
  for (std::size_t k = 0; k < N; ++k) {
    const auto it = index_of.find(-rule.freqs[k]);
    if (it == index_of.end()) {
      report.violations.push_back({HypothesisKind::CoefficientError, static_cast<long>(k), -1,
                                   "node " + std::to_string(k) +
                                       " has no sample at its negated frequency"});
      continue;
    }
    neg[k] = it->second;
  }
  if (!report.ok()) throw_report(report);

  std::vector<CoefficientEval> c;
  c.reserve(N);
  for (std::size_t j = 0; j < N; ++j) {
    try {
      c.push_back(eval_coefficients(damping, rule.node(j), true));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::MissingDerivative) throw;
      report.violations.push_back({HypothesisKind::RightDampingZero, -1, static_cast<long>(j),
                                   "node " + std::to_string(j) + ": " + e.what()});
    }
  }
  if (!report.ok()) throw_report(report);
  for (std::size_t j = 0; j < N; ++j) {
    if (rule.freqs[j] == 0.0) {
      report.violations.push_back({HypothesisKind::ZeroRightNode, -1, static_cast<long>(j),
                                   "node " + std::to_string(j) + " sits at zero"});
    }
    if (*c[j].h_prime == cplx(0.0)) {
      report.violations.push_back({HypothesisKind::HCollision, static_cast<long>(j),
                                   static_cast<long>(j),
                                   "h'(s) vanishes at node " + std::to_string(j)});
    }
  }
  const Eigen::Index p = samples.samples[0].G.rows();
  const Eigen::Index m = samples.samples[0].G.cols();
  const auto n_nodes = static_cast<Eigen::Index>(N);
  LoewnerDataSet ds;
  ds.m = m;
  ds.p = p;
  ds.mode = AssemblyMode::Hermite;
  ds.Mq.resize(p * n_nodes, m * n_nodes);
  ds.Kq.resize(p * n_nodes, m * n_nodes);
  ds.Bq.resize(p * n_nodes, m);
  ds.Cpq.resize(p, m * n_nodes);
  ds.Cvq = CMatrix::Zero(p, m * n_nodes);

  for (std::size_t k = 0; k < N; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double wk = left.weights[k];
    const auto& cl = c[neg[k]];
    const CMatrix& Gl = samples.samples[neg[k]].G;
    ds.Bq.middleRows(kk * p, p) = wk * Gl;
    for (std::size_t j = 0; j < N; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double wj = rule.weights[j];
      const auto& cr = c[j];
      const CMatrix& Gr = samples.samples[j].G;
      auto Mblk = ds.Mq.block(kk * p, jj * m, p, m);
      auto Kblk = ds.Kq.block(kk * p, jj * m, p, m);
      // d G and n G depend on s only through h, so wherever h(i theta_k)
      // meets h(i zeta_j) the divided difference becomes a derivative in h.
      // Off the matched pair this happens for even h (undamped, structural).
      if (j == neg[k] || h_collides(cl.h, cr.h)) {
        const CMatrix& Gd = *samples.samples[j].G_prime;
        const cplx scale = wk * wj / (cl.d * cr.d * *cr.h_prime);
        Mblk = -scale * (*cr.d_prime * Gr + cr.d * Gd);
        Kblk = scale * (*cr.n_prime * Gr + cr.n * Gd);
      } else {
        const cplx scale = wk * wj / (cl.d * cr.d);
        const cplx dh = cl.h - cr.h;
        Mblk = (-scale / dh) * (cl.d * Gl - cr.d * Gr);
        Kblk = (scale / dh) * (cl.n * Gl - cr.n * Gr);
      }
    }
  }
  for (std::size_t j = 0; j < N; ++j) {
    ds.Cpq.middleCols(static_cast<Eigen::Index>(j) * m, m) =
        rule.weights[j] * samples.samples[j].G;
  }
  return ds;
}

double max_imaginary_residual(const LoewnerDataSet& ds) {
  return std::max({imag_ratio(ds.Mq), imag_ratio(ds.Kq), imag_ratio(ds.Bq), imag_ratio(ds.Cpq),
                   imag_ratio(ds.Cvq)});
}

LoewnerDataSet realify(const LoewnerDataSet& ds, const QuadratureRule& left,
                       const QuadratureRule& right, const DampingSpec& damping) {
  if (ds.realified) return ds;
  if (!damping.is_conjugate_symmetric()) {
    throw Error(ErrorKind::UnsupportedDamping,
                "realification needs conjugate-symmetric damping, got " + damping.describe());
  }
  if (!left.is_pair_ordered() || !right.is_pair_ordered()) {
    throw Error(ErrorKind::InvalidParams, "realification needs pair-ordered rules");
  }
  if (left.size() != ds.left_count() || right.size() != ds.right_count()) {
    throw Error(ErrorKind::DimensionMismatch, "rules do not match the data dimensions");
  }
  const CMatrix Tl = pair_transform(left.size(), ds.p);
  const CMatrix Tr = pair_transform(right.size(), ds.m);

  LoewnerDataSet out = ds;
  out.Mq = Tl.adjoint() * ds.Mq * Tr;
  out.Kq = Tl.adjoint() * ds.Kq * Tr;
  out.Bq = Tl.adjoint() * ds.Bq;
  out.Cpq = ds.Cpq * Tr;
  out.Cvq = ds.Cvq * Tr;

  const double resid = max_imaginary_residual(out);
  if (!(resid <= kRealifyTol)) {
    std::ostringstream os;
    os << "data are not conjugate symmetric: relative imaginary residual " << resid;
    throw Error(ErrorKind::NotConjugateSymmetric, os.str());
  }
  for (CMatrix* X : {&out.Mq, &out.Kq, &out.Bq, &out.Cpq, &out.Cvq}) {
    *X = X->real().cast<cplx>();
  }
  out.realified = true;
  out.realify_residual = resid;
  return out;
}

namespace {

struct Scalings {
  CVector left, right;  // per row/column, already expanded by p and m
};

Scalings so_loewner_scalings(Eigen::Index p, Eigen::Index m, const QuadratureRule& left,
                             const QuadratureRule& right, const DampingSpec& damping) {
  if (!damping.is_rayleigh()) {
    throw Error(ErrorKind::UnsupportedDamping,
                "second-order Loewner form needs Rayleigh damping, got " + damping.describe());
  }
  check_nonzero_weights(left);
  check_nonzero_weights(right);
  Scalings s;
  s.left.resize(static_cast<Eigen::Index>(left.size()) * p);
  s.right.resize(static_cast<Eigen::Index>(right.size()) * m);
  for (std::size_t k = 0; k < left.size(); ++k) {
    const cplx v = left.weights[k] / eval_coefficients(damping, left.node(k)).d;
    s.left.segment(static_cast<Eigen::Index>(k) * p, p).setConstant(v);
  }
  for (std::size_t j = 0; j < right.size(); ++j) {
    const cplx v = right.weights[j] / eval_coefficients(damping, right.node(j)).d;
    s.right.segment(static_cast<Eigen::Index>(j) * m, m).setConstant(v);
  }
  return s;
}

}  // namespace

SoLoewnerPair to_so_loewner(const LoewnerDataSet& ds, const QuadratureRule& left,
                            const QuadratureRule& right, const DampingSpec& damping) {
  if (ds.realified) {
    throw Error(ErrorKind::InvalidParams, "second-order Loewner form needs complex data");
  }
  if (!ds.Cvq.isZero(0.0)) {
    throw Error(ErrorKind::UnsupportedDamping, "second-order Loewner form needs Cv = 0");
  }
  if (left.size() != ds.left_count() || right.size() != ds.right_count()) {
    throw Error(ErrorKind::DimensionMismatch, "rules do not match the data dimensions");
  }
  const auto s = so_loewner_scalings(ds.p, ds.m, left, right, damping);
  const CVector li = s.left.cwiseInverse();
  const CVector ri = s.right.cwiseInverse();
  SoLoewnerPair out;
  out.L = -(li.asDiagonal() * ds.Mq * ri.asDiagonal());
  out.Ls = li.asDiagonal() * ds.Kq * ri.asDiagonal();
  return out;
}

std::pair<CMatrix, CMatrix> from_so_loewner(const SoLoewnerPair& pair, Eigen::Index p,
                                            Eigen::Index m, const QuadratureRule& left,
                                            const QuadratureRule& right,
                                            const DampingSpec& damping) {
  const auto s = so_loewner_scalings(p, m, left, right, damping);
  return {-(s.left.asDiagonal() * pair.L * s.right.asDiagonal()),
          s.left.asDiagonal() * pair.Ls * s.right.asDiagonal()};
}

}  // namespace soqbt
