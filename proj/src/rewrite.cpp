#include "overt/overapprox.hpp"
#include "overt/unary_fn.hpp"

namespace overt {

namespace {

struct RewriteContext {
  std::string prefix;
  int counter;
  RewriteResult result;
  // (op, param, operand name) -> existing variable, so a subterm duplicated
  // by mul/div elimination is bounded once.
  std::map<std::tuple<int, double, std::string>, std::string> memo;

  std::string fresh() { return prefix + "v" + std::to_string(counter++); }

  std::string hoist_affine(const Expr& e) {
    std::string v = fresh();
    result.constraints.push_back({Constraint::Kind::Eq, v, e});
    return v;
  }

  // Reserves the upper/lower bound slots ahead of the defining equality so
  // the container numbering leaves room for the approximation step.
  std::string hoist_nonlinear(const Expr& e, const std::string& operand_name) {
    if (auto f = UnaryFn::from_expr(e)) {
      auto key = std::make_tuple(static_cast<int>(f->op), f->param, operand_name);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      std::string ub = fresh();
      std::string lb = fresh();
      std::string v = fresh();
      result.bound_slots[v] = {ub, lb};
      result.constraints.push_back({Constraint::Kind::Eq, v, e});
      memo[key] = v;
      return v;
    }
    // Piecewise-linear ops (relu/min/max) stay exact; no slots reserved.
    std::string v = fresh();
    result.constraints.push_back({Constraint::Kind::Eq, v, e});
    return v;
  }

  // Returns a variable name or a literal expression.
  Expr visit(const Expr& e) {
    if (e.is_var() || e.is_const()) return e;
    if (is_affine(e)) return Expr::var(hoist_affine(e));
    switch (e.kind()) {
      case Expr::Kind::Unary: {
        Expr operand = visit(e.child());
        Expr node = Expr::unary(e.unary_op(), operand, e.param());
        std::string name = operand.is_var() ? operand.var_name() : operand.to_string();
        return Expr::var(hoist_nonlinear(node, name));
      }
      case Expr::Kind::Binary: {
        switch (e.binary_op()) {
          case Expr::Bin::Add:
          case Expr::Bin::Sub: {
            Expr l = visit(e.lhs());
            Expr r = visit(e.rhs());
            return Expr::var(hoist_affine(Expr::binary(e.binary_op(), l, r)));
          }
          case Expr::Bin::Mul: {
            // Scalar multiplication; non-scalar products must already be
            // eliminated.
            if (is_constant(e.lhs())) {
              Expr r = visit(e.rhs());
              return Expr::var(hoist_affine(Expr::mul(Expr::lit(constant_value(e.lhs())), r)));
            }
            if (is_constant(e.rhs())) {
              Expr l = visit(e.lhs());
              return Expr::var(hoist_affine(Expr::mul(l, Expr::lit(constant_value(e.rhs())))));
            }
            throw EvalError("rewrite: non-scalar product (run convert_mul_div first)");
          }
          case Expr::Bin::Div: {
            if (is_constant(e.rhs())) {
              Expr l = visit(e.lhs());
              return Expr::var(
                  hoist_affine(Expr::div(l, Expr::lit(constant_value(e.rhs())))));
            }
            throw EvalError("rewrite: non-scalar quotient (run convert_mul_div first)");
          }
          case Expr::Bin::Min:
          case Expr::Bin::Max: {
            Expr l = visit(e.lhs());
            Expr r = visit(e.rhs());
            std::string v = fresh();
            result.constraints.push_back(
                {Constraint::Kind::Eq, v, Expr::binary(e.binary_op(), l, r)});
            return Expr::var(v);
          }
        }
        break;
      }
      default:
        break;
    }
    throw EvalError("rewrite: unsupported node");
  }
};

}  // namespace

RewriteResult rewrite(const Expr& e, const std::string& prefix, int counter_start) {
  RewriteContext ctx{prefix, counter_start, {}, {}};
  Expr out = ctx.visit(e);
  if (out.is_const()) {
    // Constant update: hoist so the output is always a variable.
    ctx.result.out = ctx.hoist_affine(out);
  } else {
    ctx.result.out = out.var_name();
  }
  return ctx.result;
}

}  // namespace overt
