#include "overt/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace overt {

const std::string& Expr::var_name() const {
  if (!is_var()) throw std::logic_error("Expr: not a variable");
  return node_->name;
}
double Expr::const_value() const {
  if (!is_const()) throw std::logic_error("Expr: not a constant");
  return node_->value;
}
Expr::Un Expr::unary_op() const {
  if (!is_unary()) throw std::logic_error("Expr: not a unary node");
  return node_->un;
}
double Expr::param() const {
  if (!is_unary()) throw std::logic_error("Expr: not a unary node");
  return node_->value;
}
Expr Expr::child() const {
  if (!is_unary()) throw std::logic_error("Expr: not a unary node");
  return Expr(node_->a);
}
Expr::Bin Expr::binary_op() const {
  if (!is_binary()) throw std::logic_error("Expr: not a binary node");
  return node_->bin;
}
Expr Expr::lhs() const {
  if (!is_binary()) throw std::logic_error("Expr: not a binary node");
  return Expr(node_->a);
}
Expr Expr::rhs() const {
  if (!is_binary()) throw std::logic_error("Expr: not a binary node");
  return Expr(node_->b);
}

Expr Expr::var(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = name;
  return Expr(n);
}
Expr Expr::lit(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = v;
  return Expr(n);
}
Expr Expr::unary(Un op, Expr child, double param) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->un = op;
  n->value = param;
  n->a = child.node_;
  return Expr(n);
}
Expr Expr::binary(Bin op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bin = op;
  n->a = lhs.node_;
  n->b = rhs.node_;
  return Expr(n);
}

namespace {

double eval_unary(Expr::Un op, double x, double p) {
  switch (op) {
    case Expr::Un::Sin: return std::sin(x);
    case Expr::Un::Cos: return std::cos(x);
    case Expr::Un::Exp: return std::exp(x);
    case Expr::Un::Log:
      if (x <= 0.0) throw EvalError("log of non-positive value");
      return std::log(x);
    case Expr::Un::Tanh: return std::tanh(x);
    case Expr::Un::Pow: {
      if (x < 0.0 && p != std::rint(p))
        throw EvalError("negative base with non-integer exponent");
      if (x == 0.0 && p < 0.0) throw EvalError("zero base with negative exponent");
      return std::pow(x, p);
    }
    case Expr::Un::COverX:
      if (x == 0.0) throw EvalError("division by zero");
      return p / x;
    case Expr::Un::CPowX:
      if (p <= 0.0) throw EvalError("non-positive base for c^x");
      return std::pow(p, x);
    case Expr::Un::Relu: return x > 0.0 ? x : 0.0;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

double Expr::evaluate(const Binding& b) const {
  switch (kind()) {
    case Kind::Var: {
      auto it = b.find(node_->name);
      if (it == b.end()) throw EvalError("unbound variable: " + node_->name);
      return it->second;
    }
    case Kind::Const: return node_->value;
    case Kind::Unary: return eval_unary(node_->un, Expr(node_->a).evaluate(b), node_->value);
    case Kind::Binary: {
      double l = Expr(node_->a).evaluate(b);
      double r = Expr(node_->b).evaluate(b);
      switch (node_->bin) {
        case Bin::Add: return l + r;
        case Bin::Sub: return l - r;
        case Bin::Mul: return l * r;
        case Bin::Div:
          if (r == 0.0) throw EvalError("division by zero");
          return l / r;
        case Bin::Min: return std::min(l, r);
        case Bin::Max: return std::max(l, r);
      }
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Precedence levels for printing: Add/Sub = 1, Mul/Div = 2, unary minus sits
// at 2, ^ = 3, atoms = 4.
int precedence(const Expr& e) {
  if (e.is_binary()) {
    switch (e.binary_op()) {
      case Expr::Bin::Add:
      case Expr::Bin::Sub: return 1;
      case Expr::Bin::Mul:
      case Expr::Bin::Div: return 2;
      default: return 4;  // min/max print as calls
    }
  }
  if (e.is_unary() && e.unary_op() == Expr::Un::Pow) return 3;
  if (e.is_unary() &&
      (e.unary_op() == Expr::Un::COverX || e.unary_op() == Expr::Un::CPowX))
    return e.unary_op() == Expr::Un::COverX ? 2 : 3;
  if (e.is_const() && e.const_value() < 0) return 2;
  return 4;
}

void print_rec(const Expr& e, std::ostream& os, int parent_prec) {
  int prec = precedence(e);
  bool parens = prec < parent_prec;
  if (parens) os << '(';
  switch (e.kind()) {
    case Expr::Kind::Var: os << e.var_name(); break;
    case Expr::Kind::Const: os << format_double(e.const_value()); break;
    case Expr::Kind::Unary: {
      switch (e.unary_op()) {
        case Expr::Un::Sin: os << "sin("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Cos: os << "cos("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Exp: os << "exp("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Log: os << "log("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Tanh: os << "tanh("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Relu: os << "relu("; print_rec(e.child(), os, 0); os << ')'; break;
        case Expr::Un::Pow:
          print_rec(e.child(), os, 4);
          os << " ^ " << format_double(e.param());
          break;
        case Expr::Un::COverX:
          os << format_double(e.param()) << " / ";
          print_rec(e.child(), os, 3);
          break;
        case Expr::Un::CPowX:
          os << format_double(e.param()) << " ^ ";
          print_rec(e.child(), os, 4);
          break;
      }
      break;
    }
    case Expr::Kind::Binary: {
      const char* name = nullptr;
      switch (e.binary_op()) {
        case Expr::Bin::Min: name = "min"; break;
        case Expr::Bin::Max: name = "max"; break;
        default: break;
      }
      if (name) {
        os << name << '(';
        print_rec(e.lhs(), os, 0);
        os << ", ";
        print_rec(e.rhs(), os, 0);
        os << ')';
        break;
      }
      const char* op = nullptr;
      int rp = prec + 1;  // left-assoc: rhs needs strictly higher precedence
      switch (e.binary_op()) {
        case Expr::Bin::Add: op = " + "; break;
        case Expr::Bin::Sub: op = " - "; break;
        case Expr::Bin::Mul: op = " * "; break;
        case Expr::Bin::Div: op = " / "; break;
        default: break;
      }
      print_rec(e.lhs(), os, prec);
      os << op;
      print_rec(e.rhs(), os, rp);
      break;
    }
  }
  if (parens) os << ')';
}

}  // namespace

std::string Expr::to_string() const {
  std::ostringstream os;
  print_rec(*this, os, 0);
  return os.str();
}

bool Expr::structurally_equal(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Var: return var_name() == o.var_name();
    case Kind::Const: return const_value() == o.const_value();
    case Kind::Unary:
      return unary_op() == o.unary_op() && param() == o.param() &&
             child().structurally_equal(o.child());
    case Kind::Binary:
      return binary_op() == o.binary_op() && lhs().structurally_equal(o.lhs()) &&
             rhs().structurally_equal(o.rhs());
  }
  return false;
}

bool is_constant(const Expr& e) { return free_variables(e).empty(); }

double constant_value(const Expr& e) { return e.evaluate({}); }

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    switch (cur.kind()) {
      case Expr::Kind::Var: out.insert(cur.var_name()); break;
      case Expr::Kind::Const: break;
      case Expr::Kind::Unary: stack.push_back(cur.child()); break;
      case Expr::Kind::Binary:
        stack.push_back(cur.lhs());
        stack.push_back(cur.rhs());
        break;
    }
  }
  return out;
}

std::optional<AffineForm> affine_form(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Var: {
      AffineForm f;
      f.coeffs[e.var_name()] = 1.0;
      return f;
    }
    case Expr::Kind::Const: {
      AffineForm f;
      f.constant = e.const_value();
      return f;
    }
    case Expr::Kind::Unary:
      return std::nullopt;
    case Expr::Kind::Binary: {
      switch (e.binary_op()) {
        case Expr::Bin::Add:
        case Expr::Bin::Sub: {
          auto l = affine_form(e.lhs());
          auto r = affine_form(e.rhs());
          if (!l || !r) return std::nullopt;
          double s = e.binary_op() == Expr::Bin::Add ? 1.0 : -1.0;
          for (auto& [v, c] : r->coeffs) l->coeffs[v] += s * c;
          l->constant += s * r->constant;
          return l;
        }
        case Expr::Bin::Mul: {
          // Scalar multiplication: one side must fold to a constant.
          if (is_constant(e.lhs())) {
            auto r = affine_form(e.rhs());
            if (!r) return std::nullopt;
            double c = constant_value(e.lhs());
            for (auto& [v, k] : r->coeffs) k *= c;
            r->constant *= c;
            return r;
          }
          if (is_constant(e.rhs())) {
            auto l = affine_form(e.lhs());
            if (!l) return std::nullopt;
            double c = constant_value(e.rhs());
            for (auto& [v, k] : l->coeffs) k *= c;
            l->constant *= c;
            return l;
          }
          return std::nullopt;
        }
        case Expr::Bin::Div: {
          if (!is_constant(e.rhs())) return std::nullopt;
          auto l = affine_form(e.lhs());
          if (!l) return std::nullopt;
          double c = constant_value(e.rhs());
          if (c == 0.0) return std::nullopt;
          for (auto& [v, k] : l->coeffs) k /= c;
          l->constant /= c;
          return l;
        }
        default:
          return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

bool is_affine(const Expr& e) { return affine_form(e).has_value(); }

Expr substitute(const Expr& e, const Binding& values) {
  switch (e.kind()) {
    case Expr::Kind::Var: {
      auto it = values.find(e.var_name());
      if (it != values.end()) return Expr::lit(it->second);
      return e;
    }
    case Expr::Kind::Const: return e;
    case Expr::Kind::Unary: {
      Expr c = substitute(e.child(), values);
      if (c.is_const()) return Expr::lit(eval_unary(e.unary_op(), c.const_value(), e.param()));
      return Expr::unary(e.unary_op(), c, e.param());
    }
    case Expr::Kind::Binary: {
      Expr l = substitute(e.lhs(), values);
      Expr r = substitute(e.rhs(), values);
      if (l.is_const() && r.is_const())
        return Expr::lit(Expr::binary(e.binary_op(), l, r).evaluate({}));
      return Expr::binary(e.binary_op(), l, r);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace overt
