#pragma once

#include <map>
#include <string>
#include <vector>

#include "overt/bounds1d.hpp"
#include "overt/expr.hpp"

namespace overt {

// One row of a constraint system: `var` (=|<=|>=) rhs. After approximation
// every right-hand side is affine or built from affine/min/max/relu nodes.
struct Constraint {
  enum class Kind { Eq, Le, Ge };
  Kind kind = Kind::Eq;
  std::string var;
  Expr rhs;
};

struct RewriteResult {
  std::string out;  // output variable (or input variable for a bare var)
  std::vector<Constraint> constraints;
  // Nonlinear equality var -> the pre-reserved names for its future upper
  // and lower bound variables.
  std::map<std::string, std::pair<std::string, std::string>> bound_slots;
};

// Conjunction of constraints with per-variable interval domains. The
// feasible set over (state, control) contains the graph of the original
// update map; output_vars name the next-state value per dimension.
struct OverApproximation {
  std::vector<Constraint> constraints;
  DomainMap domains;
  std::vector<std::string> output_vars;
  std::vector<std::string> state_vars;
  std::vector<std::string> control_vars;

  // Widest PWL envelope of an output var evaluated at a concrete point, by
  // walking the constraint chain; usable when the chain is functional.
  Interval envelope(const std::string& out_var, const Binding& inputs) const;
};

// Discrete-time controlled system. Updates may reference parameters by
// name; resolved_updates() substitutes and folds them.
struct SystemSpec {
  std::string name;
  std::vector<std::string> state_names;
  std::vector<std::string> control_names;
  std::vector<Expr> updates;
  std::map<std::string, double> params;

  std::vector<Expr> resolved_updates() const;
  size_t state_dim() const { return state_names.size(); }
  size_t control_dim() const { return control_names.size(); }
  std::vector<double> step(const std::vector<double>& x, const std::vector<double>& u) const;
};

// Flattens an expression into elementary constraints: affine subtrees are
// hoisted whole, +/- recurse into both operands, and each supported
// nonlinear op lands alone on a right-hand side. Every hoisted nonlinear
// equality also reserves two variable names for its eventual bounds.
// `prefix` namespaces the generated variables; `counter` continues an
// existing numbering when several expressions share one container.
RewriteResult rewrite(const Expr& e, const std::string& prefix = "", int counter_start = 1);

// Forward interval pass over an (acyclic, ordered) equality chain.
DomainMap propagate_ranges(const std::vector<Constraint>& constraints, const DomainMap& seed);

// Replaces each nonlinear equality v = e(x) by v <= ub_v, v >= lb_v plus
// definitions ub_v = UB(x), lb_v = LB(x) built over x's current domain.
// Domains for v widen to the envelope the bounds admit, and downstream
// rows propagate through the widened values, so the result stays sound
// after substitution.
OverApproximation approximate(const RewriteResult& rewritten, const DomainMap& seed,
                              const ApproxParams& p);

// Full pipeline for one system over a state box and control box:
// parameter resolution, mul/div elimination, rewriting, approximation.
OverApproximation overapproximate_dynamics(const SystemSpec& s,
                                           const std::vector<Interval>& state_box,
                                           const std::vector<Interval>& control_box,
                                           const ApproxParams& p);

std::string overapprox_to_json(const OverApproximation& oa);
}  // namespace overt
