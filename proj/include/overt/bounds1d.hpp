#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "overt/expr.hpp"
#include "overt/interval.hpp"
#include "overt/unary_fn.hpp"

namespace overt {

enum class BoundSide { Upper, Lower };

// A continuous piecewise-linear bound stored as ordered breakpoints
// (x_i, y_i). The interpolant through the breakpoints is the bound; side
// records which inequality it certifies and epsilon the applied safety
// shift.
struct PwlBound {
  std::vector<double> xs;
  std::vector<double> ys;
  BoundSide side = BoundSide::Upper;
  double epsilon = 0.0;

  size_t segments() const { return xs.empty() ? 0 : xs.size() - 1; }
  Interval support() const { return Interval(xs.front(), xs.back()); }

  // Interpolant value; x is clamped to the support.
  double value(double x) const;

  // Exact image of the interpolant over q ∩ support (piecewise-linear, so
  // the extrema sit at breakpoints or at the query endpoints).
  Interval range_over(const Interval& q) const;
  Interval range() const { return range_over(support()); }

  void validate() const;  // strictly increasing xs, matching sizes
};

struct ScalarFn {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

// One line segment y = slope*(x - x0) + y0, anchored where it was
// constructed (tangency point or left secant endpoint).
struct SegmentLine {
  double slope = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double at(double x) const { return slope * (x - x0) + y0; }
};

struct ApproxParams {
  int segments = 2;                       // n per convexity region
  std::optional<double> rel_error_target; // when set, n grows until met
  double epsilon = 1e-4;                  // bound gap added outward
  double xi = 1e-2;                       // log-shift for mul/div elimination
  double solver_tol = 1e-9;

  void validate() const;
};

// Upper bound for f convex on d: n optimally placed secant segments whose
// interior breakpoints equalize f'(x_i) with the secant slope over
// [x_{i-1}, x_{i+1}]. Endpoints interpolate f. Falls back to uniform
// spacing when the root solve stalls (any secant of a convex function is a
// valid upper bound).
PwlBound optimize_secant_breakpoints(const ScalarFn& fn, const Interval& d, int n,
                                     double tol = 1e-9);

// Upper bound for f concave on d made of n tangent segments. n == 1 is the
// single midpoint tangent; n >= 2 pins tangency at both endpoints so the
// bound interpolates f at a and b, with interior breakpoints at the
// pairwise tangent intersections. Falls back to uniform tangency points
// plus a continuity repair.
PwlBound optimize_tangent_breakpoints(const ScalarFn& fn, const Interval& d, int n,
                                      double tol = 1e-9);

// Rebuilds breakpoint values from candidate segment lines: interior y_i
// becomes max (upper) or min (lower) of the adjacent lines at x_i, which
// only moves segments away from the function.
PwlBound repair_continuity(const PwlBound& b, const std::vector<SegmentLine>& pieces);

// Tight upper/lower pair for a supported elementary function over d:
// splits at inflections, runs the secant construction on the matching side
// of each region and the tangent construction on the other (via negation),
// then shifts by ±epsilon.
std::pair<PwlBound, PwlBound> overapprox_unary(const UnaryFn& f, const Interval& d,
                                               const ApproxParams& p);

// Residual of the optimality system at the returned breakpoints (secant
// slope condition for secant bounds, tangent-intersection condition for
// tangent bounds); used by tests.
double secant_optimality_residual(const ScalarFn& fn, const PwlBound& b);
double tangent_optimality_residual(const ScalarFn& fn, const PwlBound& b);

// Closed-form expression sum_i y_i * beta_i(var) over hat basis functions
// beta_i = max(0, min((x-x_{i-1})/(x_i-x_{i-1}), (x-x_{i+1})/(x_i-x_{i+1})))
// with one-sided forms at the ends. Evaluates to y_i exactly at each
// breakpoint and contains only affine, min and max nodes.
Expr to_closed_form(const PwlBound& b, const std::string& var);

ScalarFn scalar_fn(const UnaryFn& f);

}  // namespace overt
