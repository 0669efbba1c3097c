#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "overt/interval.hpp"

namespace overt {

using Binding = std::map<std::string, double>;
using DomainMap = std::map<std::string, Interval>;

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

// Immutable expression tree. Values share nodes freely; all operations on
// expressions are pure. Multiplication and division with two non-constant
// operands are legal only until convert_mul_div has run.
class Expr {
 public:
  enum class Kind { Var, Const, Unary, Binary };
  // Pow is x^c with constant exponent `param`, COverX is c/x with constant
  // numerator `param`, CPowX is c^x with constant base `param`.
  enum class Un { Sin, Cos, Exp, Log, Tanh, Pow, COverX, CPowX, Relu };
  enum class Bin { Add, Sub, Mul, Div, Min, Max };

  Expr() = default;

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_const() const { return kind() == Kind::Const; }
  bool is_unary() const { return kind() == Kind::Unary; }
  bool is_binary() const { return kind() == Kind::Binary; }

  const std::string& var_name() const;
  double const_value() const;
  Un unary_op() const;
  double param() const;
  Expr child() const;
  Bin binary_op() const;
  Expr lhs() const;
  Expr rhs() const;

  double evaluate(const Binding& b) const;
  std::string to_string() const;

  bool structurally_equal(const Expr& o) const;

  // Factories.
  static Expr var(const std::string& name);
  static Expr lit(double v);
  static Expr unary(Un op, Expr child, double param = 0.0);
  static Expr binary(Bin op, Expr lhs, Expr rhs);

  static Expr add(Expr a, Expr b) { return binary(Bin::Add, a, b); }
  static Expr sub(Expr a, Expr b) { return binary(Bin::Sub, a, b); }
  static Expr mul(Expr a, Expr b) { return binary(Bin::Mul, a, b); }
  static Expr div(Expr a, Expr b) { return binary(Bin::Div, a, b); }
  static Expr min(Expr a, Expr b) { return binary(Bin::Min, a, b); }
  static Expr max(Expr a, Expr b) { return binary(Bin::Max, a, b); }
  static Expr sin(Expr e) { return unary(Un::Sin, e); }
  static Expr cos(Expr e) { return unary(Un::Cos, e); }
  static Expr exp(Expr e) { return unary(Un::Exp, e); }
  static Expr log(Expr e) { return unary(Un::Log, e); }
  static Expr tanh(Expr e) { return unary(Un::Tanh, e); }
  static Expr relu(Expr e) { return unary(Un::Relu, e); }
  static Expr pow(Expr e, double exponent) { return unary(Un::Pow, e, exponent); }
  static Expr c_over(double c, Expr e) { return unary(Un::COverX, e, c); }
  static Expr c_pow(double c, Expr e) { return unary(Un::CPowX, e, c); }

  bool valid() const { return node_ != nullptr; }

 private:
  struct Node {
    Kind kind;
    std::string name;     // Var
    double value = 0.0;   // Const value, or unary parameter
    Un un = Un::Sin;
    Bin bin = Bin::Add;
    std::shared_ptr<const Node> a, b;
  };
  std::shared_ptr<const Node> node_;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

// Affine view of an expression: constant + sum coeff*var. Present only when
// the tree contains nothing but +, -, scalar multiples and constant divisors.
struct AffineForm {
  std::map<std::string, double> coeffs;
  double constant = 0.0;
};
std::optional<AffineForm> affine_form(const Expr& e);
bool is_affine(const Expr& e);

// True when the tree contains no variables; `constant_value` folds it.
bool is_constant(const Expr& e);
double constant_value(const Expr& e);

std::set<std::string> free_variables(const Expr& e);

// Replaces variables by constants wherever `values` has an entry, folding
// constant subtrees so parameterized dynamics resolve to clean scalar ops.
Expr substitute(const Expr& e, const Binding& values);

// Infix grammar: + - * / ^ with usual precedence, unary minus, decimal
// literals, identifiers, and calls sin cos exp log tanh relu abs min max.
// abs(e) normalizes to max(e, -1*e); e^c requires a constant exponent and
// c^e a constant base; c/e folds to the reciprocal-scaled unary.
Expr parse(const std::string& text);

// Symbolic derivative; throws EvalError on relu/min/max nodes.
Expr differentiate(const Expr& e, const std::string& var);

// Sound interval image of `e` over box `domains` (standard interval
// arithmetic with exact rules for monotone pieces and even powers).
Interval interval_eval(const Expr& e, const DomainMap& domains);

// Eliminates x*y and x/y with two non-constant operands by the shifted
// exp/log identity; each operand's range is mapped affinely into
// [xi, 1+xi] and the inverse correction keeps the expression exactly equal
// on the domain. Scalar multiples and constant divisors pass through.
// `slack_margin` widens the mapped range so downstream sandwiching of
// nonlinear operands cannot push a log argument out of its domain.
Expr convert_mul_div(const Expr& e, const DomainMap& domains, double xi,
                     double slack_margin = 0.0);

}  // namespace overt
