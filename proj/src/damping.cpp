#include "soqbt/damping.hpp"

#include <sstream>

#include "soqbt/errors.hpp"

namespace soqbt {

DampingSpec::DampingSpec(Rayleigh r) : value_(r) {
  if (!(r.alpha >= 0.0) || !(r.beta >= 0.0)) {
    throw Error(ErrorKind::InvalidParams, "Rayleigh coefficients must be nonnegative");
  }
}

DampingSpec::DampingSpec(Structural s) : value_(s) {
  if (!(s.eta >= 0.0)) {
    throw Error(ErrorKind::InvalidParams, "structural loss factor must be nonnegative");
  }
}

DampingSpec::DampingSpec(Generalized g) : value_(std::move(g)) {
  const auto& gen = std::get<Generalized>(value_);
  if (!gen.f || !gen.g) {
    throw Error(ErrorKind::InvalidParams, "generalized damping needs f and g");
  }
}

bool DampingSpec::is_constant() const {
  if (is_rayleigh()) return true;
  if (const auto* gen = std::get_if<Generalized>(&value_)) return gen->constant;
  return false;
}

bool DampingSpec::is_conjugate_symmetric() const {
  if (is_rayleigh()) return true;
  if (const auto* gen = std::get_if<Generalized>(&value_)) {
    if (!gen->constant) return false;
    const cplx f = gen->f(cplx(1.0, 0.0));
    const cplx g = gen->g(cplx(1.0, 0.0));
    return f.imag() == 0.0 && g.imag() == 0.0;
  }
  return false;
}

std::pair<cplx, cplx> DampingSpec::constant_coefficients() const {
  if (const auto* r = std::get_if<Rayleigh>(&value_)) return {r->alpha, r->beta};
  if (const auto* gen = std::get_if<Generalized>(&value_); gen && gen->constant) {
    return {gen->f(cplx(1.0, 0.0)), gen->g(cplx(1.0, 0.0))};
  }
  throw Error(ErrorKind::UnsupportedDamping,
              "frequency-dependent damping has no constant damping matrix (" + describe() + ")");
}

std::string DampingSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* r = std::get_if<Rayleigh>(&value_)) {
    os << "rayleigh(alpha=" << r->alpha << ", beta=" << r->beta << ")";
  } else if (const auto* s = std::get_if<Structural>(&value_)) {
    os << "structural(eta=" << s->eta << ")";
  } else {
    os << "generalized" << (std::get<Generalized>(value_).constant ? "(constant)" : "");
  }
  return os.str();
}

CoefficientEval eval_coefficients(const DampingSpec& damping, cplx s, bool with_derivatives) {
  CoefficientEval c;
  c.s = s;
  cplx fp{}, gp{};
  const auto& v = damping.value();
  if (const auto* r = std::get_if<Rayleigh>(&v)) {
    c.f = r->alpha;
    c.g = r->beta;
  } else if (const auto* st = std::get_if<Structural>(&v)) {
    if (s == cplx(0.0)) {
      throw Error(ErrorKind::DomainError, "structural damping is undefined at s = 0");
    }
    c.f = 0.0;
    c.g = kI * st->eta / s;
    gp = -kI * st->eta / (s * s);
  } else {
    const auto& gen = std::get<Generalized>(v);
    c.f = gen.f(s);
    c.g = gen.g(s);
    if (with_derivatives) {
      if (gen.constant) {
        fp = gen.f_prime ? gen.f_prime(s) : cplx(0.0);
        gp = gen.g_prime ? gen.g_prime(s) : cplx(0.0);
      } else {
        if (!gen.f_prime || !gen.g_prime) {
          throw Error(ErrorKind::MissingDerivative,
                      "generalized damping derivatives requested but not supplied");
        }
        fp = gen.f_prime(s);
        gp = gen.g_prime(s);
      }
    }
  }

  c.d = 1.0 + s * c.g;
  c.n = s * s + s * c.f;
  if (c.d == cplx(0.0)) {
    throw Error(ErrorKind::DivisionByZero, "d(s) = 1 + s g(s) vanishes, h(s) undefined");
  }
  c.h = c.n / c.d;

  if (with_derivatives) {
    c.f_prime = fp;
    c.g_prime = gp;
    c.d_prime = c.g + s * gp;
    c.n_prime = 2.0 * s + c.f + s * fp;
    c.h_prime = (*c.n_prime * c.d - c.n * *c.d_prime) / (c.d * c.d);
  }
  return c;
}

}  // namespace soqbt
