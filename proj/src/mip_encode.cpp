#include <cmath>

#include "overt/bounds1d.hpp"
#include "overt/mip.hpp"

namespace overt {

int MipBuilder::add_cont(const std::string& name, const Interval& dom) {
  return problem.add_var(name, dom.lo, dom.hi, false);
}
int MipBuilder::add_bin(const std::string& name) { return problem.add_binary(name); }
void MipBuilder::add_row(LinExpr e, Rel rel, double rhs) {
  problem.add_con(std::move(e), rel, rhs);
}
std::string MipBuilder::fresh(const std::string& stem) {
  return stem + "#" + std::to_string(fresh_counter_++);
}

LinExpr MipBuilder::encode_relu(const LinExpr& z, const std::string& tag) {
  Interval zi = activity(z);
  if (zi.lo >= 0.0) return z;            // always active
  if (zi.hi <= 0.0) return LinExpr(0.0);  // always off
  int y = add_cont(fresh(tag + "_relu"), Interval(0.0, zi.hi));
  int delta = add_bin(fresh(tag + "_on"));
  // y >= z, y >= 0 (bound), y <= z - lo*(1-delta), y <= hi*delta
  LinExpr r1 = LinExpr::of_var(y);
  r1 -= z;
  add_row(r1, Rel::Ge, 0.0);
  LinExpr r2 = LinExpr::of_var(y);
  r2 -= z;
  r2 += LinExpr::of_var(delta, -zi.lo);
  add_row(r2, Rel::Le, -zi.lo);
  LinExpr r3 = LinExpr::of_var(y);
  r3 += LinExpr::of_var(delta, -zi.hi);
  add_row(r3, Rel::Le, 0.0);
  return LinExpr::of_var(y);
}

LinExpr MipBuilder::encode_minmax(bool is_max, const std::vector<LinExpr>& ops,
                                  const std::string& tag) {
  if (ops.empty()) throw std::invalid_argument("encode_minmax: no operands");
  std::vector<Interval> ivs;
  ivs.reserve(ops.size());
  for (const auto& o : ops) ivs.push_back(activity(o));

  // Operand dominance: anything that can never attain the extremum drops
  // out; a single survivor passes through with no binaries.
  double cut;
  std::vector<size_t> keep;
  if (is_max) {
    cut = ivs[0].lo;
    for (const auto& iv : ivs) cut = std::max(cut, iv.lo);
    for (size_t k = 0; k < ops.size(); ++k)
      if (ivs[k].hi >= cut) keep.push_back(k);
  } else {
    cut = ivs[0].hi;
    for (const auto& iv : ivs) cut = std::min(cut, iv.hi);
    for (size_t k = 0; k < ops.size(); ++k)
      if (ivs[k].lo <= cut) keep.push_back(k);
  }
  if (keep.size() == 1) return ops[keep[0]];

  double out_lo, out_hi;
  if (is_max) {
    out_lo = cut;
    out_hi = ivs[keep[0]].hi;
    for (size_t k : keep) out_hi = std::max(out_hi, ivs[k].hi);
  } else {
    out_hi = cut;
    out_lo = ivs[keep[0]].lo;
    for (size_t k : keep) out_lo = std::min(out_lo, ivs[k].lo);
  }
  int y = add_cont(fresh(tag + (is_max ? "_max" : "_min")), Interval(out_lo, out_hi));

  LinExpr sum_delta;
  for (size_t k : keep) {
    LinExpr side = LinExpr::of_var(y);
    side -= ops[k];
    add_row(side, is_max ? Rel::Ge : Rel::Le, 0.0);

    int delta = add_bin(fresh(tag + "_pick"));
    sum_delta += LinExpr::of_var(delta);
    if (is_max) {
      // y <= op_k + M_k*(1 - delta_k), M_k = out_hi - lo_k
      double M = out_hi - ivs[k].lo;
      LinExpr row = LinExpr::of_var(y);
      row -= ops[k];
      row += LinExpr::of_var(delta, M);
      add_row(row, Rel::Le, M);
    } else {
      double M = ivs[k].hi - out_lo;
      LinExpr row = LinExpr::of_var(y);
      row -= ops[k];
      row += LinExpr::of_var(delta, -M);
      add_row(row, Rel::Ge, -M);
    }
  }
  add_row(sum_delta, Rel::Eq, 1.0);
  return LinExpr::of_var(y);
}

LinExpr MipBuilder::encode_expr(const Expr& e, const std::map<std::string, int>& vars,
                                const std::string& tag) {
  if (auto aff = affine_form(e)) {
    LinExpr out(aff->constant);
    for (const auto& [name, coef] : aff->coeffs) {
      auto it = vars.find(name);
      if (it == vars.end()) throw EvalError("encode_expr: unknown variable " + name);
      out += LinExpr::of_var(it->second, coef);
    }
    return out;
  }
  switch (e.kind()) {
    case Expr::Kind::Unary: {
      if (e.unary_op() == Expr::Un::Relu)
        return encode_relu(encode_expr(e.child(), vars, tag), tag);
      throw EvalError("encode_expr: nonlinear node survived approximation");
    }
    case Expr::Kind::Binary: {
      switch (e.binary_op()) {
        case Expr::Bin::Add: {
          LinExpr l = encode_expr(e.lhs(), vars, tag);
          l += encode_expr(e.rhs(), vars, tag);
          return l;
        }
        case Expr::Bin::Sub: {
          LinExpr l = encode_expr(e.lhs(), vars, tag);
          l -= encode_expr(e.rhs(), vars, tag);
          return l;
        }
        case Expr::Bin::Mul: {
          if (is_constant(e.lhs())) {
            LinExpr r = encode_expr(e.rhs(), vars, tag);
            r *= constant_value(e.lhs());
            return r;
          }
          if (is_constant(e.rhs())) {
            LinExpr l = encode_expr(e.lhs(), vars, tag);
            l *= constant_value(e.rhs());
            return l;
          }
          throw EvalError("encode_expr: non-scalar product");
        }
        case Expr::Bin::Div: {
          if (!is_constant(e.rhs())) throw EvalError("encode_expr: non-scalar quotient");
          LinExpr l = encode_expr(e.lhs(), vars, tag);
          l *= 1.0 / constant_value(e.rhs());
          return l;
        }
        case Expr::Bin::Min:
        case Expr::Bin::Max: {
          std::vector<LinExpr> ops{encode_expr(e.lhs(), vars, tag),
                                   encode_expr(e.rhs(), vars, tag)};
          return encode_minmax(e.binary_op() == Expr::Bin::Max, ops, tag);
        }
      }
      break;
    }
    default:
      break;
  }
  throw EvalError("encode_expr: unsupported node");
}

std::vector<LinExpr> MipBuilder::encode_network(const Network& net,
                                                const std::vector<Interval>& box,
                                                const std::vector<LinExpr>& inputs,
                                                const std::string& tag, bool smooth,
                                                const ApproxParams* smooth_params) {
  if (inputs.size() != net.input_dim())
    throw std::invalid_argument("encode_network: input arity mismatch");
  NeuronBounds nb = neuron_bounds(net, box);
  std::vector<LinExpr> cur = inputs;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    std::vector<LinExpr> next(layer.out_dim());
    for (size_t i = 0; i < layer.out_dim(); ++i) {
      LinExpr pre(layer.bias[i]);
      for (size_t k = 0; k < layer.in_dim(); ++k) {
        if (layer.weights[i][k] == 0.0) continue;
        LinExpr term = cur[k];
        term *= layer.weights[i][k];
        pre += term;
      }
      std::string ntag = tag + "_l" + std::to_string(l) + "n" + std::to_string(i);
      switch (layer.activation) {
        case Activation::Linear:
          next[i] = std::move(pre);
          break;
        case Activation::Relu:
          next[i] = encode_relu(pre, ntag);
          break;
        case Activation::Tanh: {
          if (!smooth)
            throw EvalError("encode_network: tanh layer requires smooth activations");
          ApproxParams params = smooth_params ? *smooth_params : ApproxParams{};
          const Interval zi = nb.pre[l][i];
          // Materialize the pre-activation, sandwich tanh between its PWL
          // bounds over the neuron's input interval.
          int zv = add_cont(fresh(ntag + "_z"), zi);
          LinExpr tie = LinExpr::of_var(zv);
          tie -= pre;
          add_row(tie, Rel::Eq, 0.0);
          auto [ub, lb] = overapprox_unary(UnaryFn{Expr::Un::Tanh, 0.0}, zi, params);
          Interval oi(lb.range_over(zi).lo, ub.range_over(zi).hi);
          int ov = add_cont(fresh(ntag + "_t"), oi);
          std::map<std::string, int> zmap{{"z", zv}};
          LinExpr ub_expr = encode_expr(to_closed_form(ub, "z"), zmap, ntag + "_ub");
          LinExpr lb_expr = encode_expr(to_closed_form(lb, "z"), zmap, ntag + "_lb");
          LinExpr up = LinExpr::of_var(ov);
          up -= ub_expr;
          add_row(up, Rel::Le, 0.0);
          LinExpr dn = LinExpr::of_var(ov);
          dn -= lb_expr;
          add_row(dn, Rel::Ge, 0.0);
          next[i] = LinExpr::of_var(ov);
          break;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<Interval> output_range_mip(const Network& net, const std::vector<Interval>& box) {
  for (const auto& layer : net.layers)
    if (layer.activation == Activation::Tanh)
      throw EvalError("output_range_mip: exact envelope needs relu/linear layers");
  MipBuilder b;
  std::vector<LinExpr> inputs;
  for (size_t i = 0; i < box.size(); ++i)
    inputs.push_back(LinExpr::of_var(b.add_cont("x" + std::to_string(i), box[i])));
  std::vector<LinExpr> outs = b.encode_network(net, box, inputs, "net");

  std::vector<Interval> range;
  auto solver = make_reference_solver();
  for (auto& out : outs) {
    MipProblem p = b.problem;
    p.objective = out;
    p.maximize = false;
    SolveResult lo = solver->optimize(p, {});
    p.maximize = true;
    SolveResult hi = solver->optimize(p, {});
    if (lo.status != SolveResult::Status::Optimal || hi.status != SolveResult::Status::Optimal)
      throw EvalError("output_range_mip: solver failed");
    range.emplace_back(lo.bound, hi.bound);
  }
  return range;
}

}  // namespace overt
