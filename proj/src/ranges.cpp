#include "overt/overapprox.hpp"

namespace overt {

DomainMap propagate_ranges(const std::vector<Constraint>& constraints, const DomainMap& seed) {
  DomainMap dom = seed;
  for (const auto& c : constraints) {
    if (c.kind != Constraint::Kind::Eq)
      throw EvalError("propagate_ranges: expected an equality chain");
    dom[c.var] = interval_eval(c.rhs, dom);
  }
  return dom;
}

std::vector<Expr> SystemSpec::resolved_updates() const {
  Binding values(params.begin(), params.end());
  std::vector<Expr> out;
  out.reserve(updates.size());
  for (const auto& u : updates) out.push_back(substitute(u, values));
  return out;
}

std::vector<double> SystemSpec::step(const std::vector<double>& x,
                                     const std::vector<double>& u) const {
  if (x.size() != state_names.size() || u.size() != control_names.size())
    throw std::invalid_argument("SystemSpec::step: dimension mismatch");
  Binding b(params.begin(), params.end());
  for (size_t i = 0; i < x.size(); ++i) b[state_names[i]] = x[i];
  for (size_t i = 0; i < u.size(); ++i) b[control_names[i]] = u[i];
  std::vector<double> next(updates.size());
  for (size_t i = 0; i < updates.size(); ++i) next[i] = updates[i].evaluate(b);
  return next;
}

Interval OverApproximation::envelope(const std::string& out_var, const Binding& inputs) const {
  std::map<std::string, Interval> vals;
  for (const auto& [name, v] : inputs) vals[name] = Interval::point(v);

  // Bound rows reference variables defined later in the container, so sweep
  // until nothing new resolves.
  auto known = [&](const Expr& e) {
    for (const auto& v : free_variables(e))
      if (!vals.count(v)) return false;
    return true;
  };
  std::vector<char> done(constraints.size(), 0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t i = 0; i < constraints.size(); ++i) {
      if (done[i]) continue;
      const auto& c = constraints[i];
      if (!known(c.rhs)) continue;
      DomainMap local(vals.begin(), vals.end());
      Interval r = interval_eval(c.rhs, local);
      auto it = vals.find(c.var);
      switch (c.kind) {
        case Constraint::Kind::Eq:
          vals[c.var] = it == vals.end() ? r : it->second.intersect(r);
          break;
        case Constraint::Kind::Le: {
          Interval cur = it == vals.end()
                             ? Interval(-std::numeric_limits<double>::infinity(), r.hi)
                             : Interval(it->second.lo, std::min(it->second.hi, r.hi));
          vals[c.var] = cur;
          break;
        }
        case Constraint::Kind::Ge: {
          Interval cur = it == vals.end()
                             ? Interval(r.lo, std::numeric_limits<double>::infinity())
                             : Interval(std::max(it->second.lo, r.lo), it->second.hi);
          vals[c.var] = cur;
          break;
        }
      }
      done[i] = 1;
      progress = true;
    }
  }
  auto it = vals.find(out_var);
  if (it == vals.end() || !it->second.finite())
    throw EvalError("envelope: chain is not functional for " + out_var);
  return it->second;
}

}  // namespace overt
