#include "overt/unary_fn.hpp"

#include <cmath>

namespace overt {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_integer(double v) { return v == std::rint(v); }

// Grid points c + k*step strictly inside (lo, hi).
std::vector<double> lattice_interior(double c, double step, const Interval& d) {
  std::vector<double> out;
  double k0 = std::ceil((d.lo - c) / step);
  for (double k = k0;; k += 1.0) {
    double x = c + k * step;
    if (x >= d.hi) break;
    if (x > d.lo) out.push_back(x);
  }
  return out;
}

}  // namespace

double UnaryFn::eval(double x) const {
  switch (op) {
    case Expr::Un::Sin: return std::sin(x);
    case Expr::Un::Cos: return std::cos(x);
    case Expr::Un::Exp: return std::exp(x);
    case Expr::Un::Log:
      if (x <= 0.0) throw EvalError("log of non-positive value");
      return std::log(x);
    case Expr::Un::Tanh: return std::tanh(x);
    case Expr::Un::Pow: return std::pow(x, param);
    case Expr::Un::COverX:
      if (x == 0.0) throw EvalError("division by zero");
      return param / x;
    case Expr::Un::CPowX: return std::pow(param, x);
    case Expr::Un::Relu: return x > 0.0 ? x : 0.0;
  }
  throw std::logic_error("unreachable");
}

double UnaryFn::deriv(double x) const {
  switch (op) {
    case Expr::Un::Sin: return std::cos(x);
    case Expr::Un::Cos: return -std::sin(x);
    case Expr::Un::Exp: return std::exp(x);
    case Expr::Un::Log: return 1.0 / x;
    case Expr::Un::Tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Expr::Un::Pow: return param * std::pow(x, param - 1.0);
    case Expr::Un::COverX: return -param / (x * x);
    case Expr::Un::CPowX: return std::log(param) * std::pow(param, x);
    case Expr::Un::Relu: throw EvalError("relu is not differentiable");
  }
  throw std::logic_error("unreachable");
}

double UnaryFn::second(double x) const {
  switch (op) {
    case Expr::Un::Sin: return -std::sin(x);
    case Expr::Un::Cos: return -std::cos(x);
    case Expr::Un::Exp: return std::exp(x);
    case Expr::Un::Log: return -1.0 / (x * x);
    case Expr::Un::Tanh: {
      double t = std::tanh(x);
      return -2.0 * t * (1.0 - t * t);
    }
    case Expr::Un::Pow: return param * (param - 1.0) * std::pow(x, param - 2.0);
    case Expr::Un::COverX: return 2.0 * param / (x * x * x);
    case Expr::Un::CPowX: {
      double l = std::log(param);
      return l * l * std::pow(param, x);
    }
    case Expr::Un::Relu: throw EvalError("relu is not differentiable");
  }
  throw std::logic_error("unreachable");
}

void UnaryFn::check_domain(const Interval& d) const {
  if (!d.finite()) throw EvalError("domain must be finite");
  switch (op) {
    case Expr::Un::Log:
      if (d.lo <= 0.0) throw EvalError("log domain must be positive");
      break;
    case Expr::Un::COverX:
      if (d.contains(0.0)) throw EvalError("c/x domain must exclude 0");
      break;
    case Expr::Un::CPowX:
      if (param <= 0.0) throw EvalError("c^x requires positive base");
      break;
    case Expr::Un::Pow:
      if (!is_integer(param) && d.lo < 0.0)
        throw EvalError("x^c with non-integer exponent needs x >= 0");
      if (param < 0.0 && d.contains(0.0))
        throw EvalError("x^c with negative exponent needs a domain excluding 0");
      break;
    default:
      break;
  }
}

std::vector<double> UnaryFn::inflections(const Interval& d) const {
  check_domain(d);
  switch (op) {
    case Expr::Un::Sin: return lattice_interior(0.0, kPi, d);
    case Expr::Un::Cos: return lattice_interior(kPi / 2.0, kPi, d);
    case Expr::Un::Tanh:
      return d.lo < 0.0 && 0.0 < d.hi ? std::vector<double>{0.0} : std::vector<double>{};
    case Expr::Un::Exp:
    case Expr::Un::Log:
    case Expr::Un::CPowX:
    case Expr::Un::COverX:
      return {};
    case Expr::Un::Pow: {
      // f'' = c(c-1)x^(c-2): sign change at 0 only for odd integer c with
      // c-2 odd, i.e. odd c >= 3 (negative odd exponents exclude 0 anyway).
      if (is_integer(param) && param >= 3.0 &&
          std::fmod(param, 2.0) != 0.0 && d.lo < 0.0 && 0.0 < d.hi)
        return {0.0};
      return {};
    }
    case Expr::Un::Relu:
      throw EvalError("find_inflections: unsupported function tag");
  }
  throw std::logic_error("unreachable");
}

std::vector<double> find_inflections(const UnaryFn& f, const Interval& d) {
  return f.inflections(d);
}

Interval unary_range(Expr::Un op, double param, const Interval& x) {
  auto mono_inc = [&](double (*f)(double)) { return Interval(f(x.lo), f(x.hi)); };
  switch (op) {
    case Expr::Un::Sin:
    case Expr::Un::Cos: {
      // Shift cos to sin phase: cos(t) = sin(t + pi/2).
      double shift = op == Expr::Un::Cos ? kPi / 2.0 : 0.0;
      double lo = shift + x.lo, hi = shift + x.hi;
      double s1 = op == Expr::Un::Cos ? std::cos(x.lo) : std::sin(x.lo);
      double s2 = op == Expr::Un::Cos ? std::cos(x.hi) : std::sin(x.hi);
      double rlo = std::min(s1, s2), rhi = std::max(s1, s2);
      if (hi - lo >= 2.0 * kPi) return Interval(-1.0, 1.0);
      // sin attains 1 at pi/2 + 2k*pi and -1 at -pi/2 + 2k*pi.
      double kmax = std::ceil((lo - kPi / 2.0) / (2.0 * kPi));
      if (kPi / 2.0 + 2.0 * kPi * kmax <= hi) rhi = 1.0;
      double kmin = std::ceil((lo + kPi / 2.0) / (2.0 * kPi));
      if (-kPi / 2.0 + 2.0 * kPi * kmin <= hi) rlo = -1.0;
      return Interval(rlo, rhi);
    }
    case Expr::Un::Exp: return mono_inc(+[](double v) { return std::exp(v); });
    case Expr::Un::Log:
      if (x.lo <= 0.0) throw EvalError("log of non-positive interval");
      return mono_inc(+[](double v) { return std::log(v); });
    case Expr::Un::Tanh: return mono_inc(+[](double v) { return std::tanh(v); });
    case Expr::Un::Pow: {
      double c = param;
      if (c == 0.0) return Interval(1.0, 1.0);
      bool integer = is_integer(c);
      if (!integer && x.lo < 0.0)
        throw EvalError("x^c with non-integer exponent on a negative domain");
      if (c < 0.0 && x.contains(0.0))
        throw EvalError("x^c with negative exponent across 0");
      bool even = integer && std::fmod(std::fabs(c), 2.0) == 0.0;
      double plo = std::pow(x.lo, c), phi = std::pow(x.hi, c);
      if (even && c > 0.0) {
        double m = std::max(plo, phi);
        return x.contains(0.0) ? Interval(0.0, m)
                               : Interval(std::min(plo, phi), m);
      }
      if (even && c < 0.0) {
        // Even negative power: decreasing in |x|.
        double lo = std::min(plo, phi), hi = std::max(plo, phi);
        return Interval(lo, hi);
      }
      // Odd integer powers and non-integer powers on x >= 0 are monotone
      // (increasing for c > 0, decreasing for c < 0 on a sign-definite
      // domain).
      return Interval(std::min(plo, phi), std::max(plo, phi));
    }
    case Expr::Un::COverX: {
      if (x.contains(0.0)) throw EvalError("c/x across 0");
      double a = param / x.lo, b = param / x.hi;
      return Interval(std::min(a, b), std::max(a, b));
    }
    case Expr::Un::CPowX: {
      if (param <= 0.0) throw EvalError("c^x requires positive base");
      double a = std::pow(param, x.lo), b = std::pow(param, x.hi);
      return Interval(std::min(a, b), std::max(a, b));
    }
    case Expr::Un::Relu:
      return Interval(std::max(0.0, x.lo), std::max(0.0, x.hi));
  }
  throw std::logic_error("unreachable");
}

Interval UnaryFn::range(const Interval& d) const { return unary_range(op, param, d); }

std::optional<UnaryFn> UnaryFn::from_expr(const Expr& e) {
  if (!e.is_unary()) return std::nullopt;
  switch (e.unary_op()) {
    case Expr::Un::Sin:
    case Expr::Un::Cos:
    case Expr::Un::Exp:
    case Expr::Un::Log:
    case Expr::Un::Tanh:
    case Expr::Un::Pow:
    case Expr::Un::COverX:
    case Expr::Un::CPowX:
      return UnaryFn{e.unary_op(), e.param()};
    default:
      return std::nullopt;
  }
}

}  // namespace overt
