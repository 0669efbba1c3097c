#include <algorithm>
#include <cmath>

#include "overt/bounds1d.hpp"

namespace overt {

namespace {

ScalarFn negated(const ScalarFn& fn) {
  return ScalarFn{[f = fn.f](double x) { return -f(x); },
                  [df = fn.df](double x) { return -df(x); }};
}

PwlBound negate_bound(PwlBound b) {
  for (double& y : b.ys) y = -y;
  b.side = b.side == BoundSide::Upper ? BoundSide::Lower : BoundSide::Upper;
  return b;
}

struct RegionPair {
  PwlBound upper;
  PwlBound lower;
};

// One region of uniform convexity: the convex side takes optimized secants,
// the other side optimized tangents via negation. Tangent bounds with a
// single segment cannot also interpolate both endpoints, so multi-region
// domains force at least two tangent segments to keep the stitched bound
// continuous.
RegionPair bound_region(const ScalarFn& fn, const Interval& d, bool convex, int n,
                        bool multi_region, double tol) {
  int n_tan = (multi_region && n < 2) ? 2 : n;
  RegionPair out;
  if (convex) {
    out.upper = optimize_secant_breakpoints(fn, d, n, tol);
    out.lower = negate_bound(optimize_tangent_breakpoints(negated(fn), d, n_tan, tol));
  } else {
    out.upper = optimize_tangent_breakpoints(fn, d, n_tan, tol);
    out.lower = negate_bound(optimize_secant_breakpoints(negated(fn), d, n, tol));
  }
  return out;
}

double max_relative_gap(const UnaryFn& f, const RegionPair& p, const Interval& d) {
  const int kGrid = 2048;
  double gap = 0.0, scale = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    double x = d.lo + d.width() * i / kGrid;
    double fx = f.eval(x);
    scale = std::max(scale, std::fabs(fx));
    gap = std::max(gap, p.upper.value(x) - fx);
    gap = std::max(gap, fx - p.lower.value(x));
  }
  return gap / std::max(scale, 1e-12);
}

void append_region(PwlBound& acc, const PwlBound& region, bool first) {
  size_t start = 0;
  if (!first) {
    // Shared boundary: both sides interpolate f there, keep the outer value
    // in case of roundoff.
    double& y = acc.ys.back();
    y = acc.side == BoundSide::Upper ? std::max(y, region.ys.front())
                                     : std::min(y, region.ys.front());
    start = 1;
  }
  for (size_t i = start; i < region.xs.size(); ++i) {
    acc.xs.push_back(region.xs[i]);
    acc.ys.push_back(region.ys[i]);
  }
}

}  // namespace

std::pair<PwlBound, PwlBound> overapprox_unary(const UnaryFn& f, const Interval& d,
                                               const ApproxParams& p) {
  p.validate();
  f.check_domain(d);

  // Degenerate domains (collapsed reach boxes) get a flat band.
  if (d.width() <= 4e-12) {
    Interval q = d.width() == 0.0 ? Interval(d.lo, d.lo + 1e-12) : d;
    Interval r = f.range(q);
    PwlBound ub{{q.lo, q.hi}, {r.hi + p.epsilon, r.hi + p.epsilon}, BoundSide::Upper, p.epsilon};
    PwlBound lb{{q.lo, q.hi}, {r.lo - p.epsilon, r.lo - p.epsilon}, BoundSide::Lower, p.epsilon};
    return {ub, lb};
  }

  ScalarFn fn = scalar_fn(f);
  std::vector<double> cuts = f.inflections(d);
  std::vector<double> edges{d.lo};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(d.hi);
  const bool multi = edges.size() > 2;

  PwlBound upper, lower;
  upper.side = BoundSide::Upper;
  lower.side = BoundSide::Lower;

  for (size_t r = 0; r + 1 < edges.size(); ++r) {
    Interval region(edges[r], edges[r + 1]);

    RegionPair pair;
    if (region.width() < 1e-9) {
      // An inflection grazing a domain edge leaves a sliver; a flat band
      // over its range is sound and keeps breakpoints distinct.
      Interval range = f.range(region);
      pair.upper = PwlBound{{region.lo, region.hi}, {range.hi, range.hi}, BoundSide::Upper, 0.0};
      pair.lower = PwlBound{{region.lo, region.hi}, {range.lo, range.lo}, BoundSide::Lower, 0.0};
    } else {
      bool convex = f.second(region.mid()) >= 0.0;
      if (p.rel_error_target) {
        for (int n = 1; n <= 64; n *= 2) {
          pair = bound_region(fn, region, convex, n, multi, p.solver_tol);
          if (max_relative_gap(f, pair, region) <= *p.rel_error_target || n == 64) break;
        }
      } else {
        pair = bound_region(fn, region, convex, p.segments, multi, p.solver_tol);
      }
    }

    append_region(upper, pair.upper, r == 0);
    append_region(lower, pair.lower, r == 0);
  }

  for (double& y : upper.ys) y += p.epsilon;
  for (double& y : lower.ys) y -= p.epsilon;
  upper.epsilon = p.epsilon;
  lower.epsilon = p.epsilon;
  upper.validate();
  lower.validate();
  return {upper, lower};
}

}  // namespace overt
