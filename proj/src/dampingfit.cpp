#include "soqbt/dampingfit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "soqbt/errors.hpp"

namespace soqbt {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 80;
constexpr int kMaxDoublings = 60;
constexpr double kCurvature = 0.9;
constexpr double kStall = 1e-14;
constexpr double kClamp = 1e-12;

void check_params(const DampingFitProblem& problem, const RVector& params) {
  if (static_cast<std::size_t>(params.size()) != problem.parameter_count()) {
    throw Error(ErrorKind::InvalidParams, "wrong number of damping parameters");
  }
  if (!params.allFinite()) throw Error(ErrorKind::InvalidParams, "parameters must be finite");
}

CMatrix fit_pencil(const DampingFitProblem& pb, const RVector& x, cplx s) {
  if (pb.model == DampingModel::Rayleigh) {
    return (s * s + s * x(0)) * pb.Mt + (1.0 + s * x(1)) * pb.Kt;
  }
  return s * s * pb.Mt + cplx(1.0, x(0)) * pb.Kt;
}

// Accumulates cost and, optionally, the gradient.
double evaluate(const DampingFitProblem& pb, const RVector& x, RVector* grad) {
  check_params(pb, x);
  double J = 0.0;
  if (grad) *grad = RVector::Zero(x.size());
  for (std::size_t k = 0; k < pb.nodes.size(); ++k) {
    const cplx s = pb.nodes[k];
    const CMatrix phi = fit_pencil(pb, x, s);
    const Eigen::PartialPivLU<CMatrix> lu(phi);
    if (!(lu.rcond() >= 1e-14)) {
      std::ostringstream os;
      os.precision(17);
      os << "reduced pencil singular at sample " << k << " (s = " << s << ")";
      throw Error(ErrorKind::SingularReducedPencil, os.str());
    }
    const CMatrix C = pb.Cpt + s * pb.Cvt;
    const CMatrix X = lu.solve(pb.Bt);
    const CMatrix E = pb.data[k] - C * X;
    J += E.squaredNorm();
    if (grad) {
      const CMatrix Z = Eigen::PartialPivLU<CMatrix>(phi.adjoint()).solve(C.adjoint() * E);
      if (pb.model == DampingModel::Rayleigh) {
        (*grad)(0) += 2.0 * (s * (Z.adjoint() * pb.Mt * X).trace()).real();
        (*grad)(1) += 2.0 * (s * (Z.adjoint() * pb.Kt * X).trace()).real();
      } else {
        (*grad)(0) += 2.0 * (kI * (Z.adjoint() * pb.Kt * X).trace()).real();
      }
    }
  }
  return J;
}

double cost_or_inf(const DampingFitProblem& pb, const RVector& x) {
  try {
    return evaluate(pb, x, nullptr);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularReducedPencil) return std::numeric_limits<double>::infinity();
    throw;
  }
}

}  // namespace

void DampingFitProblem::check() const {
  if (nodes.empty()) throw Error(ErrorKind::InvalidParams, "damping fit needs at least one sample");
  if (nodes.size() != data.size()) {
    throw Error(ErrorKind::DimensionMismatch, "node and data counts differ");
  }
  const auto r = Kt.rows();
  if (Kt.cols() != r || Mt.rows() != r || Mt.cols() != r || Bt.rows() != r || Cpt.cols() != r ||
      Cvt.cols() != r || Cvt.rows() != Cpt.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent reduced matrices");
  }
  for (const auto& g : data) {
    if (g.rows() != Cpt.rows() || g.cols() != Bt.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "data sample shape differs from p x m");
    }
  }
}

DampingFitProblem make_fit_problem(const ReducedSecondOrderModel& rom,
                                   const std::vector<TransferSample>& samples,
                                   DampingModel model) {
  rom.check();
  DampingFitProblem pb;
  pb.model = model;
  pb.Mt = CMatrix::Identity(rom.r(), rom.r());
  pb.Kt = rom.Kt;
  pb.Bt = rom.But;
  pb.Cpt = rom.Cpt;
  pb.Cvt = rom.Cvt;
  for (const auto& smp : samples) {
    pb.nodes.push_back(smp.node);
    pb.data.push_back(smp.G);
  }
  pb.check();
  return pb;
}

double fit_cost(const DampingFitProblem& problem, const RVector& params) {
  return evaluate(problem, params, nullptr);
}

RVector fit_gradient(const DampingFitProblem& problem, const RVector& params) {
  RVector g;
  evaluate(problem, params, &g);
  return g;
}

std::pair<double, RVector> fit_cost_and_gradient(const DampingFitProblem& problem,
                                                 const RVector& params) {
  RVector g;
  const double J = evaluate(problem, params, &g);
  return {J, g};
}

std::string_view to_string(FitStop stop) {
  switch (stop) {
    case FitStop::Gradient: return "gradient";
    case FitStop::Step: return "step";
    case FitStop::MaxIter: return "max_iter";
    case FitStop::LineSearch: return "line_search";
  }
  return "unknown";
}

FitResult fit_damping(const DampingFitProblem& problem, const RVector& init,
                      const FitOptions& opts) {
  problem.check();
  check_params(problem, init);
  const auto n = init.size();

  RVector x = init;
  auto [f, g] = fit_cost_and_gradient(problem, x);
  if (!std::isfinite(f)) throw Error(ErrorKind::SingularReducedPencil, "cost is not finite at init");

  FitResult res;
  res.trace.push_back({x, f});
  // First trial step has unit length; the gradient scale is arbitrary.
  auto initial_inverse_hessian = [n](const RVector& grad) {
    const double gn = grad.norm();
    return RMatrix(RMatrix::Identity(n, n) * (gn > 0.0 ? 1.0 / gn : 1.0));
  };
  RMatrix H = initial_inverse_hessian(g);
  bool scaled = false;
  res.stop = FitStop::MaxIter;

  for (int it = 0; it < opts.max_iter; ++it) {
    if (g.norm() <= opts.grad_tol) {
      res.stop = FitStop::Gradient;
      break;
    }
    RVector d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      H = initial_inverse_hessian(g);
      d = -H * g;
      slope = g.dot(d);
    }
    double t = 1.0;
    double ft = std::numeric_limits<double>::infinity();
    RVector xt;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      xt = x + t * d;
      ft = cost_or_inf(problem, xt);
      if (ft <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.stop = FitStop::LineSearch;
      res.warnings.push_back("line search failed to find sufficient decrease at iteration " +
                             std::to_string(it));
      break;
    }
    RVector gt = fit_gradient(problem, xt);
    // Expansion: while the unit step still descends steeply, keep doubling
    // as long as the Armijo condition holds and the cost keeps dropping.
    if (t == 1.0) {
      for (int e = 0; e < kMaxDoublings && gt.dot(d) < kCurvature * slope; ++e) {
        const RVector xe = x + 2.0 * t * d;
        const double fe = cost_or_inf(problem, xe);
        if (!(fe <= f + kArmijo * 2.0 * t * slope) || !(fe < ft)) break;
        t *= 2.0;
        xt = xe;
        ft = fe;
        gt = fit_gradient(problem, xt);
      }
    }
    const RVector s = xt - x;
    const RVector y = gt - g;
    const double f_prev = f;
    x = xt;
    f = ft;
    g = gt;
    ++res.iterations;
    res.trace.push_back({x, f});

    // Ill-conditioned valleys produce long runs of short steps that still
    // make progress, so a short step only stops the search once the cost
    // no longer drops beyond roundoff.
    if (s.norm() <= opts.step_tol * (1.0 + x.norm()) && f_prev - f <= kStall * std::abs(f_prev)) {
      res.stop = FitStop::Step;
      break;
    }
    const double ys = y.dot(s);
    if (ys > 1e-16 * y.norm() * s.norm()) {
      if (!scaled) {
        H = RMatrix::Identity(n, n) * (ys / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / ys;
      const RMatrix V = RMatrix::Identity(n, n) - rho * s * y.transpose();
      H = V * H * V.transpose() + rho * s * s.transpose();
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i) != 0.0 && std::abs(x(i)) < kClamp) {
      std::ostringstream os;
      os.precision(17);
      os << "parameter " << i << " = " << x(i) << " clamped to 0";
      res.warnings.push_back(os.str());
      x(i) = 0.0;
    }
  }
  res.params = x;
  const auto cg = fit_cost_and_gradient(problem, x);
  res.final_cost = cg.first;
  res.grad_norm = cg.second.norm();
  return res;
}

DampingSpec fitted_damping(DampingModel model, const RVector& params) {
  if (model == DampingModel::Rayleigh) return Rayleigh{params(0), params(1)};
  return Structural{params(0)};
}

ReducedSecondOrderModel with_fitted_damping(const ReducedSecondOrderModel& rom,
                                            DampingModel model, const RVector& params) {
  ReducedSecondOrderModel out = rom;
  out.damping = fitted_damping(model, params);
  out.Dt.reset();
  return out;
}

}  // namespace soqbt
