#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace overt {

// Closed interval [lo, hi]. Domains fed to the bounding and encoding
// layers must be finite; helpers assert that where it matters.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double l, double h) : lo(l), hi(h) {
    if (!(l <= h))
      throw std::invalid_argument("Interval: lo > hi (" + std::to_string(l) +
                                  ", " + std::to_string(h) + ")");
  }

  static Interval point(double v) { return Interval(v, v); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

  Interval hull(const Interval& o) const {
    return Interval(std::min(lo, o.lo), std::max(hi, o.hi));
  }
  Interval intersect(const Interval& o) const {
    return Interval(std::max(lo, o.lo), std::min(hi, o.hi));
  }
  Interval widened(double by) const { return Interval(lo - by, hi + by); }

  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }
inline Interval operator*(double c, const Interval& a) {
  return c >= 0 ? Interval(c * a.lo, c * a.hi) : Interval(c * a.hi, c * a.lo);
}
inline Interval operator*(const Interval& a, const Interval& b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                  std::max(std::max(p1, p2), std::max(p3, p4)));
}

inline Interval interval_min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}
inline Interval interval_max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

}  // namespace overt
