#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "overt/bounds1d.hpp"

namespace overt {

void PwlBound::validate() const {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw std::invalid_argument("PwlBound: need >= 2 breakpoints with matching values");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i - 1] < xs[i]))
      throw std::invalid_argument("PwlBound: breakpoints must be strictly increasing");
}

double PwlBound::value(double x) const {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  size_t hi = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
  size_t lo = hi - 1;
  double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

Interval PwlBound::range_over(const Interval& q) const {
  Interval clipped(std::max(q.lo, xs.front()), std::min(q.hi, xs.back()));
  if (clipped.lo > clipped.hi) clipped = Interval::point(std::clamp(q.lo, xs.front(), xs.back()));
  double lo = value(clipped.lo), hi = lo;
  auto fold = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  fold(value(clipped.hi));
  for (size_t i = 0; i < xs.size(); ++i)
    if (clipped.lo < xs[i] && xs[i] < clipped.hi) fold(ys[i]);
  return Interval(lo, hi);
}

void ApproxParams::validate() const {
  if (rel_error_target && *rel_error_target <= 0.0)
    throw std::invalid_argument("ApproxParams: error target must be positive");
  if (!rel_error_target && segments < 1)
    throw std::invalid_argument("ApproxParams: need at least one segment");
  if (epsilon < 0.0) throw std::invalid_argument("ApproxParams: epsilon must be >= 0");
  if (xi <= 0.0) throw std::invalid_argument("ApproxParams: xi must be positive");
  if (solver_tol <= 0.0) throw std::invalid_argument("ApproxParams: solver_tol must be positive");
}

ScalarFn scalar_fn(const UnaryFn& f) {
  return ScalarFn{[f](double x) { return f.eval(x); },
                  [f](double x) { return f.deriv(x); }};
}

Expr to_closed_form(const PwlBound& b, const std::string& var) {
  b.validate();
  const auto& xs = b.xs;
  const auto& ys = b.ys;
  const size_t n = xs.size() - 1;
  Expr x = Expr::var(var);

  // Normalized distance to the neighbouring breakpoint; the division keeps
  // beta_i(x_i) = 1 exact in floating point.
  auto toward = [&](size_t i, size_t j) {
    return Expr::div(Expr::sub(x, Expr::lit(xs[j])), Expr::lit(xs[i] - xs[j]));
  };

  Expr sum;
  for (size_t i = 0; i <= n; ++i) {
    Expr basis;
    if (i == 0) {
      basis = Expr::max(Expr::lit(0.0), toward(0, 1));
    } else if (i == n) {
      basis = Expr::max(Expr::lit(0.0), toward(n, n - 1));
    } else {
      basis = Expr::max(Expr::lit(0.0), Expr::min(toward(i, i - 1), toward(i, i + 1)));
    }
    Expr term = Expr::mul(Expr::lit(ys[i]), basis);
    sum = sum.valid() ? Expr::add(sum, term) : term;
  }
  return sum;
}

}  // namespace overt
