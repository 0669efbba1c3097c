#pragma once

#include <optional>
#include <vector>

#include "overt/expr.hpp"
#include "overt/interval.hpp"

namespace overt {

// An elementary scalar function f(x), possibly carrying a constant parameter
// (exponent of x^c, numerator of c/x, base of c^x). This closed set is what
// the one-dimensional bounding machinery knows how to split into convexity
// regions analytically.
struct UnaryFn {
  Expr::Un op;
  double param = 0.0;

  double eval(double x) const;
  double deriv(double x) const;
  double second(double x) const;

  // Interior points of d where f'' changes sign, strictly increasing.
  // Throws EvalError for tags outside the supported analytic set or when d
  // leaves the function's domain (e.g. c/x across 0).
  std::vector<double> inflections(const Interval& d) const;

  // Exact image of d (monotone pieces and even powers handled directly).
  Interval range(const Interval& d) const;

  // Checks d against the function's natural domain; throws EvalError if the
  // function is undefined somewhere on d.
  void check_domain(const Interval& d) const;

  // Recognizes a single supported nonlinear op applied to a variable.
  static std::optional<UnaryFn> from_expr(const Expr& e);

  Expr apply(const Expr& operand) const { return Expr::unary(op, operand, param); }
};

// Interval image of one unary op; shared by interval_eval and UnaryFn.
Interval unary_range(Expr::Un op, double param, const Interval& x);

std::vector<double> find_inflections(const UnaryFn& f, const Interval& d);

}  // namespace overt
