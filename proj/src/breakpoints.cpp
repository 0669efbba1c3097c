#include <cmath>
#include <functional>
#include <vector>

#include "overt/bounds1d.hpp"

namespace overt {

namespace {

using Vec = std::vector<double>;
using System = std::function<void(const Vec&, Vec&)>;

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool ordered_interior(const Vec& x, const Interval& d, double margin) {
  double prev = d.lo;
  for (double xi : x) {
    if (!(xi > prev + margin)) return false;
    prev = xi;
  }
  return prev < d.hi - margin;
}

// Dense LU with partial pivoting; returns false on a (near-)singular matrix.
bool lu_solve(std::vector<Vec>& a, Vec& rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-14) return false;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (size_t r = col + 1; r < n; ++r) {
      double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      rhs[r] -= m * rhs[col];
    }
  }
  for (size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (size_t c = i + 1; c < n; ++c) s -= a[i][c] * rhs[c];
    rhs[i] = s / a[i][i];
  }
  return true;
}

// Damped Newton on F(x) = 0 keeping d.lo < x_1 < ... < x_k < d.hi.
bool solve_interior(const System& F, Vec& x, const Interval& d, double tol) {
  const size_t k = x.size();
  if (k == 0) return true;
  const double margin = 1e-12 * std::max(1.0, d.width());
  Vec r(k), r_try(k), step(k);
  F(x, r);
  double norm = inf_norm(r);
  for (int iter = 0; iter < 200 && norm > tol; ++iter) {
    // Forward-difference Jacobian.
    std::vector<Vec> jac(k, Vec(k));
    Vec xp = x, rp(k);
    for (size_t j = 0; j < k; ++j) {
      double h = 1e-7 * std::max(1.0, std::fabs(x[j]));
      xp[j] = x[j] + h;
      F(xp, rp);
      for (size_t i = 0; i < k; ++i) jac[i][j] = (rp[i] - r[i]) / h;
      xp[j] = x[j];
    }
    step = r;
    for (double& s : step) s = -s;
    {
      std::vector<Vec> jc = jac;
      if (!lu_solve(jc, step)) return false;
    }
    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-6) {
      Vec xt(k);
      for (size_t j = 0; j < k; ++j) xt[j] = x[j] + t * step[j];
      if (ordered_interior(xt, d, margin)) {
        F(xt, r_try);
        double nt = inf_norm(r_try);
        if (nt < norm) {
          x = xt;
          r = r_try;
          norm = nt;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) return norm <= tol;
  }
  return norm <= tol;
}

Vec uniform_interior(const Interval& d, int n) {
  Vec x;
  for (int i = 1; i < n; ++i) x.push_back(d.lo + d.width() * i / n);
  return x;
}

// Intersection abscissa of the tangents at alpha and beta.
double tangent_intersection(const ScalarFn& fn, double alpha, double beta, bool& ok) {
  double fa = fn.f(alpha), fb = fn.f(beta);
  double da = fn.df(alpha), db = fn.df(beta);
  double denom = db - da;
  if (std::fabs(denom) < 1e-13 * std::max({1.0, std::fabs(da), std::fabs(db)})) {
    ok = false;
    return 0.5 * (alpha + beta);
  }
  ok = true;
  return (beta * db - alpha * da) / denom - (fb - fa) / denom;
}

// Tangency points for n segments with endpoint pinning: first at a, last at
// b, the rest at subinterval midpoints.
Vec tangency_points(const Vec& interior, const Interval& d) {
  size_t n = interior.size() + 1;
  Vec t(n);
  t[0] = d.lo;
  t[n - 1] = d.hi;
  for (size_t i = 1; i + 1 < n; ++i) t[i] = 0.5 * (interior[i - 1] + interior[i]);
  return t;
}

}  // namespace

PwlBound repair_continuity(const PwlBound& b, const std::vector<SegmentLine>& pieces) {
  b.validate();
  if (pieces.size() + 1 != b.xs.size())
    throw std::invalid_argument("repair_continuity: one line per segment required");
  PwlBound out = b;
  const bool upper = b.side == BoundSide::Upper;
  out.ys.front() = pieces.front().at(b.xs.front());
  out.ys.back() = pieces.back().at(b.xs.back());
  for (size_t i = 1; i + 1 < b.xs.size(); ++i) {
    double left = pieces[i - 1].at(b.xs[i]);
    double right = pieces[i].at(b.xs[i]);
    out.ys[i] = upper ? std::max(left, right) : std::min(left, right);
  }
  return out;
}

PwlBound optimize_secant_breakpoints(const ScalarFn& fn, const Interval& d, int n,
                                     double tol) {
  if (n < 1) throw std::invalid_argument("optimize_secant_breakpoints: n >= 1");
  Vec interior = uniform_interior(d, n);
  if (!interior.empty()) {
    auto system = [&](const Vec& x, Vec& r) {
      for (size_t i = 0; i < x.size(); ++i) {
        double xl = i == 0 ? d.lo : x[i - 1];
        double xr = i + 1 == x.size() ? d.hi : x[i + 1];
        r[i] = fn.df(x[i]) - (fn.f(xr) - fn.f(xl)) / (xr - xl);
      }
    };
    if (!solve_interior(system, interior, d, tol))
      interior = uniform_interior(d, n);  // still a valid bound
  }
  PwlBound b;
  b.side = BoundSide::Upper;
  b.xs.push_back(d.lo);
  for (double x : interior) b.xs.push_back(x);
  b.xs.push_back(d.hi);
  for (double x : b.xs) b.ys.push_back(fn.f(x));
  b.validate();
  return b;
}

PwlBound optimize_tangent_breakpoints(const ScalarFn& fn, const Interval& d, int n,
                                      double tol) {
  if (n < 1) throw std::invalid_argument("optimize_tangent_breakpoints: n >= 1");

  if (n == 1) {
    double m = d.mid();
    SegmentLine line{fn.df(m), m, fn.f(m)};
    PwlBound b;
    b.side = BoundSide::Upper;
    b.xs = {d.lo, d.hi};
    b.ys = {line.at(d.lo), line.at(d.hi)};
    b.validate();
    return b;
  }

  Vec interior = uniform_interior(d, n);
  bool solved = false;
  if (n == 2) {
    bool ok = false;
    double x1 = tangent_intersection(fn, d.lo, d.hi, ok);
    if (ok && d.lo < x1 && x1 < d.hi) {
      interior = {x1};
      solved = true;
    }
  } else {
    auto system = [&](const Vec& x, Vec& r) {
      Vec t = tangency_points(x, d);
      for (size_t i = 0; i < x.size(); ++i) {
        bool ok = false;
        double xi = tangent_intersection(fn, t[i], t[i + 1], ok);
        r[i] = ok ? x[i] - xi : 0.0;
      }
    };
    solved = solve_interior(system, interior, d, tol);
    if (!solved) interior = uniform_interior(d, n);
  }

  Vec t = tangency_points(interior, d);
  std::vector<SegmentLine> lines;
  for (double ti : t) lines.push_back(SegmentLine{fn.df(ti), ti, fn.f(ti)});

  PwlBound b;
  b.side = BoundSide::Upper;
  b.xs.push_back(d.lo);
  for (double x : interior) b.xs.push_back(x);
  b.xs.push_back(d.hi);
  b.ys.assign(b.xs.size(), 0.0);
  b.validate();
  return repair_continuity(b, lines);
}

double secant_optimality_residual(const ScalarFn& fn, const PwlBound& b) {
  double worst = 0.0;
  for (size_t i = 1; i + 1 < b.xs.size(); ++i) {
    double slope = (fn.f(b.xs[i + 1]) - fn.f(b.xs[i - 1])) / (b.xs[i + 1] - b.xs[i - 1]);
    worst = std::max(worst, std::fabs(fn.df(b.xs[i]) - slope));
  }
  return worst;
}

double tangent_optimality_residual(const ScalarFn& fn, const PwlBound& b) {
  if (b.xs.size() < 3) return 0.0;
  Vec interior(b.xs.begin() + 1, b.xs.end() - 1);
  Interval d(b.xs.front(), b.xs.back());
  Vec t = tangency_points(interior, d);
  double worst = 0.0;
  for (size_t i = 0; i < interior.size(); ++i) {
    bool ok = false;
    double xi = tangent_intersection(fn, t[i], t[i + 1], ok);
    if (ok) worst = std::max(worst, std::fabs(interior[i] - xi));
  }
  return worst;
}

}  // namespace overt
