#include <cmath>

#include "overt/expr.hpp"

namespace overt {

namespace {

bool is_zero(const Expr& e) { return e.is_const() && e.const_value() == 0.0; }
bool is_one(const Expr& e) { return e.is_const() && e.const_value() == 1.0; }

Expr fadd(Expr a, Expr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  if (a.is_const() && b.is_const()) return Expr::lit(a.const_value() + b.const_value());
  return Expr::add(a, b);
}
Expr fsub(Expr a, Expr b) {
  if (is_zero(b)) return a;
  if (a.is_const() && b.is_const()) return Expr::lit(a.const_value() - b.const_value());
  return Expr::sub(a, b);
}
Expr fmul(Expr a, Expr b) {
  if (is_zero(a) || is_zero(b)) return Expr::lit(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (a.is_const() && b.is_const()) return Expr::lit(a.const_value() * b.const_value());
  return Expr::mul(a, b);
}
Expr fdiv(Expr a, Expr b) {
  if (is_zero(a)) return Expr::lit(0.0);
  if (is_one(b)) return a;
  if (a.is_const() && b.is_const()) return Expr::lit(a.const_value() / b.const_value());
  return Expr::div(a, b);
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case Expr::Kind::Var:
      return Expr::lit(e.var_name() == var ? 1.0 : 0.0);
    case Expr::Kind::Const:
      return Expr::lit(0.0);
    case Expr::Kind::Unary: {
      Expr u = e.child();
      Expr du = differentiate(u, var);
      switch (e.unary_op()) {
        case Expr::Un::Sin: return fmul(Expr::cos(u), du);
        case Expr::Un::Cos: return fmul(Expr::lit(-1.0), fmul(Expr::sin(u), du));
        case Expr::Un::Exp: return fmul(Expr::exp(u), du);
        case Expr::Un::Log: return fdiv(du, u);
        case Expr::Un::Tanh:
          return fmul(fsub(Expr::lit(1.0), Expr::pow(Expr::tanh(u), 2.0)), du);
        case Expr::Un::Pow: {
          double c = e.param();
          if (c == 0.0) return Expr::lit(0.0);
          if (c == 1.0) return du;
          return fmul(Expr::lit(c), fmul(Expr::pow(u, c - 1.0), du));
        }
        case Expr::Un::COverX:
          // d/dx c/u = -c * u^-2 * u'
          return fmul(Expr::lit(-e.param()), fmul(Expr::pow(u, -2.0), du));
        case Expr::Un::CPowX:
          return fmul(Expr::lit(std::log(e.param())), fmul(Expr::c_pow(e.param(), u), du));
        case Expr::Un::Relu:
          throw EvalError("differentiate: relu is not differentiable");
      }
      break;
    }
    case Expr::Kind::Binary: {
      Expr l = e.lhs(), r = e.rhs();
      switch (e.binary_op()) {
        case Expr::Bin::Add: return fadd(differentiate(l, var), differentiate(r, var));
        case Expr::Bin::Sub: return fsub(differentiate(l, var), differentiate(r, var));
        case Expr::Bin::Mul:
          return fadd(fmul(differentiate(l, var), r), fmul(l, differentiate(r, var)));
        case Expr::Bin::Div:
          // (l'r - lr') / r^2
          return fdiv(fsub(fmul(differentiate(l, var), r), fmul(l, differentiate(r, var))),
                      Expr::pow(r, 2.0));
        case Expr::Bin::Min:
        case Expr::Bin::Max:
          throw EvalError("differentiate: min/max is not differentiable");
      }
      break;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace overt
