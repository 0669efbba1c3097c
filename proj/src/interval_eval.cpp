#include <cmath>

#include "overt/expr.hpp"
#include "overt/unary_fn.hpp"

namespace overt {

Interval interval_eval(const Expr& e, const DomainMap& domains) {
  switch (e.kind()) {
    case Expr::Kind::Var: {
      auto it = domains.find(e.var_name());
      if (it == domains.end()) throw EvalError("no domain for variable: " + e.var_name());
      return it->second;
    }
    case Expr::Kind::Const:
      return Interval::point(e.const_value());
    case Expr::Kind::Unary:
      return unary_range(e.unary_op(), e.param(), interval_eval(e.child(), domains));
    case Expr::Kind::Binary: {
      Interval l = interval_eval(e.lhs(), domains);
      Interval r = interval_eval(e.rhs(), domains);
      switch (e.binary_op()) {
        case Expr::Bin::Add: return l + r;
        case Expr::Bin::Sub: return l - r;
        case Expr::Bin::Mul: return l * r;
        case Expr::Bin::Div: {
          if (r.contains(0.0)) throw EvalError("interval division across 0");
          Interval recip(std::min(1.0 / r.lo, 1.0 / r.hi),
                         std::max(1.0 / r.lo, 1.0 / r.hi));
          return l * recip;
        }
        case Expr::Bin::Min: return interval_min(l, r);
        case Expr::Bin::Max: return interval_max(l, r);
      }
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

// x*y over [l1,u1]x[l2,u2] becomes
//   exp(log(s1) + log(s2)) / (a1*a2) - (b2/a2)*x - (b1/a1)*y - b1*b2/(a1*a2)
// with s_i = a_i*op_i + b_i mapping each operand range onto [xi, 1+xi].
// `margin` widens the mapped interval so that an operand whose value is
// later relaxed to a sandwich band (nonlinear subterms) cannot push the log
// argument below xi.
Expr product_via_logs(const Expr& x, const Expr& y, const Interval& dx,
                      const Interval& dy, double xi, double margin) {
  if (!dx.finite() || !dy.finite())
    throw EvalError("convert_mul_div: unbounded operand domain");
  auto shift = [&](const Interval& d) {
    double m = margin + 0.25 * d.width();
    double width = d.width() + 2.0 * m;
    double a = width > 0.0 ? 1.0 / width : 1.0;  // zero-width handled by caller
    double b = xi - a * (d.lo - m);
    return std::pair<double, double>(a, b);
  };
  auto [a1, b1] = shift(dx);
  auto [a2, b2] = shift(dy);
  Expr s1 = Expr::add(Expr::mul(Expr::lit(a1), x), Expr::lit(b1));
  Expr s2 = Expr::add(Expr::mul(Expr::lit(a2), y), Expr::lit(b2));
  Expr core = Expr::mul(Expr::lit(1.0 / (a1 * a2)),
                        Expr::exp(Expr::add(Expr::log(s1), Expr::log(s2))));
  Expr corr = Expr::add(
      Expr::add(Expr::mul(Expr::lit(b2 / a2), x), Expr::mul(Expr::lit(b1 / a1), y)),
      Expr::lit(b1 * b2 / (a1 * a2)));
  return Expr::sub(core, corr);
}

Expr convert_rec(const Expr& e, const DomainMap& domains, double xi, double margin) {
  switch (e.kind()) {
    case Expr::Kind::Var:
    case Expr::Kind::Const:
      return e;
    case Expr::Kind::Unary:
      return Expr::unary(e.unary_op(), convert_rec(e.child(), domains, xi, margin), e.param());
    case Expr::Kind::Binary: {
      Expr l = convert_rec(e.lhs(), domains, xi, margin);
      Expr r = convert_rec(e.rhs(), domains, xi, margin);
      switch (e.binary_op()) {
        case Expr::Bin::Mul: {
          if (is_constant(l) || is_constant(r)) return Expr::mul(l, r);  // scalar multiply
          Interval dl = interval_eval(l, domains);
          Interval dr = interval_eval(r, domains);
          // An operand whose interval collapses to a point is a constant in
          // disguise; keep the multiplication scalar.
          if (dl.width() == 0.0) return Expr::mul(Expr::lit(dl.lo), r);
          if (dr.width() == 0.0) return Expr::mul(l, Expr::lit(dr.lo));
          return product_via_logs(l, r, dl, dr, xi, margin);
        }
        case Expr::Bin::Div: {
          if (is_constant(r)) {
            double c = constant_value(r);
            if (c == 0.0) throw EvalError("division by zero");
            return Expr::div(l, Expr::lit(c));
          }
          Interval dr = interval_eval(r, domains);
          if (dr.contains(0.0))
            throw EvalError("convert_mul_div: divisor domain contains 0");
          if (dr.width() == 0.0) return Expr::div(l, Expr::lit(dr.lo));
          Expr recip = Expr::c_over(1.0, r);
          if (is_constant(l)) return Expr::mul(l, recip);
          Interval dl = interval_eval(l, domains);
          if (dl.width() == 0.0) return Expr::mul(Expr::lit(dl.lo), recip);
          Interval drec(std::min(1.0 / dr.lo, 1.0 / dr.hi),
                        std::max(1.0 / dr.lo, 1.0 / dr.hi));
          return product_via_logs(l, recip, dl, drec, xi, margin);
        }
        default:
          return Expr::binary(e.binary_op(), l, r);
      }
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Expr convert_mul_div(const Expr& e, const DomainMap& domains, double xi, double slack_margin) {
  if (xi <= 0.0) throw std::invalid_argument("convert_mul_div: xi must be positive");
  if (slack_margin < 0.0)
    throw std::invalid_argument("convert_mul_div: slack margin must be >= 0");
  return convert_rec(e, domains, xi, slack_margin);
}

}  // namespace overt
