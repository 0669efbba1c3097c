#include <functional>

#include "overt/mip.hpp"

namespace overt {

namespace {

// Per-step name resolution. Affine equality definitions stay symbolic and
// get inlined into referencing rows; variables that carry inequality
// constraints (the sandwiched nonlinear values) or cross timesteps are
// materialized with their domain bounds.
struct StepScope {
  MipBuilder& b;
  const OverApproximation& step;
  std::string prefix;
  std::map<std::string, Expr> defs;       // pending equality definitions
  std::map<std::string, LinExpr> solved;  // memoized resolutions

  LinExpr resolve(const std::string& name) {
    auto hit = solved.find(name);
    if (hit != solved.end()) return hit->second;
    auto def = defs.find(name);
    LinExpr out;
    if (def != defs.end()) {
      out = encode(def->second);
    } else {
      auto dom = step.domains.find(name);
      if (dom == step.domains.end())
        throw EvalError("build_query: no domain for " + name);
      out = LinExpr::of_var(b.add_cont(prefix + name, dom->second));
    }
    solved.emplace(name, out);
    return out;
  }

  LinExpr encode(const Expr& e) {
    if (auto aff = affine_form(e)) {
      LinExpr out(aff->constant);
      for (const auto& [name, coef] : aff->coeffs) {
        LinExpr t = resolve(name);
        t *= coef;
        out += t;
      }
      return out;
    }
    switch (e.kind()) {
      case Expr::Kind::Unary:
        if (e.unary_op() == Expr::Un::Relu)
          return b.encode_relu(encode(e.child()), prefix + "r");
        throw EvalError("build_query: nonlinear node survived approximation");
      case Expr::Kind::Binary:
        switch (e.binary_op()) {
          case Expr::Bin::Add: {
            LinExpr l = encode(e.lhs());
            l += encode(e.rhs());
            return l;
          }
          case Expr::Bin::Sub: {
            LinExpr l = encode(e.lhs());
            l -= encode(e.rhs());
            return l;
          }
          case Expr::Bin::Mul: {
            if (is_constant(e.lhs())) {
              LinExpr r = encode(e.rhs());
              r *= constant_value(e.lhs());
              return r;
            }
            if (is_constant(e.rhs())) {
              LinExpr l = encode(e.lhs());
              l *= constant_value(e.rhs());
              return l;
            }
            throw EvalError("build_query: non-scalar product");
          }
          case Expr::Bin::Div: {
            if (!is_constant(e.rhs())) throw EvalError("build_query: non-scalar quotient");
            LinExpr l = encode(e.lhs());
            l *= 1.0 / constant_value(e.rhs());
            return l;
          }
          case Expr::Bin::Min:
          case Expr::Bin::Max:
            return b.encode_minmax(e.binary_op() == Expr::Bin::Max,
                                   {encode(e.lhs()), encode(e.rhs())}, prefix + "m");
        }
        break;
      default:
        break;
    }
    throw EvalError("build_query: unsupported node");
  }
};

}  // namespace

UnrolledQuery build_query(const std::vector<const OverApproximation*>& steps,
                          const std::vector<Interval>& input_box, const Network* controller,
                          const QueryOptions& opt) {
  UnrolledQuery q;
  MipBuilder b;
  const size_t n = steps.size();
  const size_t dim = input_box.size();

  for (const auto* s : steps) {
    if (!s) throw std::invalid_argument("build_query: null step");
    if (s->state_vars.size() != dim)
      throw std::invalid_argument("build_query: state dimension mismatch");
  }

  // States for every timestep up front. Each variable's bounds intersect
  // everything known about it: the box its step was abstracted over, the
  // upstream output envelope, and (at t = 0) the query's input set.
  q.state_vars.assign(n + 1, std::vector<int>(dim, -1));
  for (size_t t = 0; t <= n; ++t) {
    for (size_t k = 0; k < dim; ++k) {
      Interval bounds = t == 0 ? input_box[k]
                               : steps[t - 1]->domains.at(steps[t - 1]->output_vars[k]);
      if (t < n) {
        Interval built_over = steps[t]->domains.at(steps[t]->state_vars[k]);
        if (!bounds.intersects(built_over))
          throw EvalError("build_query: inconsistent domains between chained approximations");
        bounds = bounds.intersect(built_over);
      }
      std::string name = "t" + std::to_string(t) + "_" +
                         (n ? steps[0]->state_vars[k] : "s" + std::to_string(k));
      q.state_vars[t][k] = b.add_cont(name, bounds);
    }
  }

  for (size_t t = 0; t < n; ++t) {
    const OverApproximation& step = *steps[t];
    std::string prefix = "t" + std::to_string(t) + "_";
    StepScope scope{b, step, prefix, {}, {}};

    for (size_t k = 0; k < dim; ++k)
      scope.solved[step.state_vars[k]] = LinExpr::of_var(q.state_vars[t][k]);

    // Controller feeds the step's control variables.
    if (!step.control_vars.empty()) {
      if (!controller) throw std::invalid_argument("build_query: controller required");
      std::vector<Interval> state_box;
      std::vector<LinExpr> ins;
      for (size_t k = 0; k < dim; ++k) {
        state_box.push_back(step.domains.at(step.state_vars[k]));
        ins.push_back(LinExpr::of_var(q.state_vars[t][k]));
      }
      std::vector<LinExpr> outs =
          b.encode_network(*controller, state_box, ins, prefix + "net",
                           opt.smooth_activations, &opt.approx);
      if (outs.size() != step.control_vars.size())
        throw std::invalid_argument("build_query: controller output dim mismatch");
      for (size_t c = 0; c < outs.size(); ++c) {
        LinExpr u = scope.resolve(step.control_vars[c]);
        u -= outs[c];
        b.add_row(u, Rel::Eq, 0.0);
      }
    }

    std::map<std::string, size_t> out_index;
    for (size_t k = 0; k < dim; ++k) out_index[step.output_vars[k]] = k;

    for (const auto& c : step.constraints) {
      if (c.kind == Constraint::Kind::Eq) {
        auto out_it = out_index.find(c.var);
        if (out_it == out_index.end()) {
          scope.defs.emplace(c.var, c.rhs);  // inlined on demand
          continue;
        }
        // Next-state binding row.
        LinExpr row = LinExpr::of_var(q.state_vars[t + 1][out_it->second]);
        row -= scope.encode(c.rhs);
        b.add_row(row, Rel::Eq, 0.0);
        scope.solved[c.var] = LinExpr::of_var(q.state_vars[t + 1][out_it->second]);
        continue;
      }
      LinExpr lhs = scope.resolve(c.var);
      lhs -= scope.encode(c.rhs);
      b.add_row(lhs, c.kind == Constraint::Kind::Le ? Rel::Le : Rel::Ge, 0.0);
    }
  }

  q.problem = std::move(b.problem);
  return q;
}

void append_negated_predicate(UnrolledQuery& q, const std::vector<LinearAtom>& conj,
                              size_t t, const std::vector<std::string>& state_names) {
  if (conj.empty()) throw std::invalid_argument("append_negated_predicate: empty predicate");
  if (t >= q.state_vars.size())
    throw std::invalid_argument("append_negated_predicate: timestep out of range");

  auto var_of = [&](const std::string& name) {
    for (size_t k = 0; k < state_names.size(); ++k)
      if (state_names[k] == name) return q.state_vars[t][k];
    throw std::invalid_argument("append_negated_predicate: unknown state " + name);
  };

  struct Disjunct {
    LinExpr expr;
    Rel rel;
    double rhs;
  };
  std::vector<Disjunct> disjuncts;
  for (const auto& atom : conj) {
    LinExpr e;
    for (const auto& [name, coef] : atom.coeffs) e += LinExpr::of_var(var_of(name), coef);
    switch (atom.rel) {
      case Rel::Ge: disjuncts.push_back({std::move(e), Rel::Le, atom.rhs}); break;
      case Rel::Le: disjuncts.push_back({std::move(e), Rel::Ge, atom.rhs}); break;
      case Rel::Eq:
        throw std::invalid_argument("append_negated_predicate: equality atoms unsupported");
    }
  }

  if (disjuncts.size() == 1) {
    q.problem.add_con(std::move(disjuncts[0].expr), disjuncts[0].rel, disjuncts[0].rhs);
    return;
  }
  // Indicator per disjunct; big-M from the variables' bounds.
  LinExpr sum;
  for (size_t j = 0; j < disjuncts.size(); ++j) {
    int gamma = q.problem.add_binary("notP_pick" + std::to_string(j) + "_t" + std::to_string(t));
    sum += LinExpr::of_var(gamma);
    Interval act = q.problem.activity(disjuncts[j].expr);
    if (disjuncts[j].rel == Rel::Le) {
      double M = act.hi - disjuncts[j].rhs;
      if (M < 0) M = 0;
      LinExpr row = disjuncts[j].expr;
      row += LinExpr::of_var(gamma, M);
      q.problem.add_con(std::move(row), Rel::Le, disjuncts[j].rhs + M);
    } else {
      double M = disjuncts[j].rhs - act.lo;
      if (M < 0) M = 0;
      LinExpr row = disjuncts[j].expr;
      row += LinExpr::of_var(gamma, -M);
      q.problem.add_con(std::move(row), Rel::Ge, disjuncts[j].rhs - M);
    }
  }
  q.problem.add_con(std::move(sum), Rel::Eq, 1.0);
}

}  // namespace overt
