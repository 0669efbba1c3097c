#include "overt/overapprox.hpp"
#include "overt/unary_fn.hpp"

namespace overt {

OverApproximation approximate(const RewriteResult& rewritten, const DomainMap& seed,
                              const ApproxParams& p) {
  p.validate();
  OverApproximation oa;
  oa.domains = seed;
  for (const auto& c : rewritten.constraints) {
    if (c.kind != Constraint::Kind::Eq)
      throw EvalError("approximate: rewrite output must be an equality chain");
    auto fn = UnaryFn::from_expr(c.rhs);
    if (!fn) {
      // Affine or exact piecewise-linear row: keep it, propagate its range.
      oa.constraints.push_back(c);
      oa.domains[c.var] = interval_eval(c.rhs, oa.domains);
      continue;
    }
    Expr operand = c.rhs.child();
    if (!operand.is_var())
      throw EvalError("approximate: nonlinear operand must be a variable");
    const std::string& x = operand.var_name();
    auto dom_it = oa.domains.find(x);
    if (dom_it == oa.domains.end())
      throw EvalError("approximate: no domain for " + x);
    Interval dx = dom_it->second;

    auto [ub, lb] = overapprox_unary(*fn, dx, p);
    auto slot = rewritten.bound_slots.find(c.var);
    if (slot == rewritten.bound_slots.end())
      throw EvalError("approximate: missing bound slot for " + c.var);
    const auto& [ub_name, lb_name] = slot->second;

    oa.constraints.push_back({Constraint::Kind::Le, c.var, Expr::var(ub_name)});
    oa.constraints.push_back({Constraint::Kind::Ge, c.var, Expr::var(lb_name)});
    oa.constraints.push_back({Constraint::Kind::Eq, ub_name, to_closed_form(ub, x)});
    oa.constraints.push_back({Constraint::Kind::Eq, lb_name, to_closed_form(lb, x)});

    Interval ub_range = ub.range_over(dx);
    Interval lb_range = lb.range_over(dx);
    oa.domains[ub_name] = ub_range;
    oa.domains[lb_name] = lb_range;
    // The abstraction lets the variable float anywhere between the bounds.
    oa.domains[c.var] = Interval(lb_range.lo, ub_range.hi);
  }
  oa.output_vars = {rewritten.out};
  return oa;
}

OverApproximation overapproximate_dynamics(const SystemSpec& s,
                                           const std::vector<Interval>& state_box,
                                           const std::vector<Interval>& control_box,
                                           const ApproxParams& p) {
  if (state_box.size() != s.state_dim() || control_box.size() != s.control_dim())
    throw std::invalid_argument("overapproximate_dynamics: box dimension mismatch");
  DomainMap seed;
  for (size_t i = 0; i < state_box.size(); ++i) seed[s.state_names[i]] = state_box[i];
  for (size_t i = 0; i < control_box.size(); ++i) seed[s.control_names[i]] = control_box[i];

  OverApproximation merged;
  merged.domains = seed;
  merged.state_vars = s.state_names;
  merged.control_vars = s.control_names;

  auto resolved = s.resolved_updates();
  for (size_t k = 0; k < resolved.size(); ++k) {
    std::string prefix = "d" + std::to_string(k) + "_";
    Expr converted = convert_mul_div(resolved[k], seed, p.xi, 2.0 * p.epsilon + 1e-9);
    RewriteResult rr = rewrite(converted, prefix);
    if (rr.constraints.empty()) {
      // Identity update x_{k}' = x_j: materialize a row so every dimension
      // has an output variable.
      std::string v = prefix + "v1";
      rr.constraints.push_back({Constraint::Kind::Eq, v, Expr::var(rr.out)});
      rr.out = v;
    }
    OverApproximation part = approximate(rr, seed, p);
    for (auto& c : part.constraints) merged.constraints.push_back(std::move(c));
    for (const auto& [name, dom] : part.domains) merged.domains[name] = dom;
    merged.output_vars.push_back(rr.out);
  }
  return merged;
}

}  // namespace overt
