#include <cmath>

#include "overt/mip.hpp"

namespace overt {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [v, c] : o.terms) {
    double& t = terms[v];
    t += c;
    if (t == 0.0) terms.erase(v);
  }
  constant += o.constant;
  return *this;
}
LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [v, c] : o.terms) {
    double& t = terms[v];
    t -= c;
    if (t == 0.0) terms.erase(v);
  }
  constant -= o.constant;
  return *this;
}
LinExpr& LinExpr::operator*=(double s) {
  if (s == 0.0) {
    terms.clear();
    constant = 0.0;
    return *this;
  }
  for (auto& [v, c] : terms) c *= s;
  constant *= s;
  return *this;
}

int MipProblem::add_var(const std::string& name, double lo, double hi, bool binary) {
  if (!(lo <= hi)) throw std::invalid_argument("MipProblem: empty bounds for " + name);
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("MipProblem: bounds must be finite for " + name);
  vars.push_back({name, lo, hi, binary});
  return static_cast<int>(vars.size()) - 1;
}

void MipProblem::add_con(LinExpr e, Rel rel, double rhs) {
  rhs -= e.constant;
  e.constant = 0.0;
  for (const auto& [v, c] : e.terms) {
    (void)c;
    if (v < 0 || v >= static_cast<int>(vars.size()))
      throw std::invalid_argument("MipProblem: constraint references unknown variable");
  }
  cons.push_back({std::move(e), rel, rhs});
}

Interval MipProblem::activity(const LinExpr& e) const {
  double lo = e.constant, hi = e.constant;
  for (const auto& [v, c] : e.terms) {
    const Var& var = vars[v];
    if (c >= 0) {
      lo += c * var.lo;
      hi += c * var.hi;
    } else {
      lo += c * var.hi;
      hi += c * var.lo;
    }
  }
  return Interval(lo, hi);
}

size_t MipProblem::num_binaries() const {
  size_t n = 0;
  for (const auto& v : vars) n += v.binary;
  return n;
}

void MipProblem::validate() const {
  for (const auto& v : vars)
    if (!std::isfinite(v.lo) || !std::isfinite(v.hi) || v.lo > v.hi)
      throw std::invalid_argument("MipProblem: bad bounds on " + v.name);
}

double MipProblem::violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (size_t j = 0; j < vars.size(); ++j) {
    worst = std::max(worst, vars[j].lo - x[j]);
    worst = std::max(worst, x[j] - vars[j].hi);
  }
  for (const auto& c : cons) {
    double v = 0.0;
    for (const auto& [j, coef] : c.expr.terms) v += coef * x[j];
    switch (c.rel) {
      case Rel::Le: worst = std::max(worst, v - c.rhs); break;
      case Rel::Ge: worst = std::max(worst, c.rhs - v); break;
      case Rel::Eq: worst = std::max(worst, std::fabs(v - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace overt
