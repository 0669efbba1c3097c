#include <cctype>
#include <charconv>
#include <cstdlib>

#include "overt/expr.hpp"

namespace overt {

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) throw ParseError(std::string("expected '") + c + "'", pos);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      if (consume('+')) {
        e = Expr::add(e, parse_term());
      } else if (consume('-')) {
        e = Expr::sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    while (true) {
      if (consume('*')) {
        e = Expr::mul(e, parse_unary());
      } else if (consume('/')) {
        e = make_div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (consume('-')) {
      Expr e = parse_unary();
      if (e.is_const()) return Expr::lit(-e.const_value());
      return Expr::mul(Expr::lit(-1.0), e);
    }
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (!consume('^')) return base;
    size_t at = pos;
    Expr exponent = parse_unary();  // right-associative
    if (is_constant(exponent)) {
      double c = constant_value(exponent);
      if (base.is_const()) return Expr::lit(Expr::pow(base, c).evaluate({}));
      return Expr::pow(base, c);
    }
    if (base.is_const()) {
      double c = base.const_value();
      if (c <= 0.0) throw ParseError("base of c^x must be positive", at);
      return Expr::c_pow(c, exponent);
    }
    throw ParseError("exponent must be constant (or base constant for c^x)", at);
  }

  static Expr make_div(Expr num, Expr den) {
    if (is_constant(den)) {
      double c = constant_value(den);
      if (c == 0.0) throw EvalError("division by zero");
      return Expr::div(num, Expr::lit(c));
    }
    if (is_constant(num)) return Expr::c_over(constant_value(num), den);
    return Expr::div(num, den);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parse_number() {
    const char* begin = text.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos);
    pos += static_cast<size_t>(end - begin);
    return Expr::lit(v);
  }

  Expr parse_ident() {
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);
    if (peek() != '(') return Expr::var(name);
    ++pos;  // '('
    std::vector<Expr> args;
    if (peek() != ')') {
      args.push_back(parse_expr());
      while (consume(',')) args.push_back(parse_expr());
    }
    expect(')');
    return make_call(name, args, start);
  }

  static Expr make_call(const std::string& name, const std::vector<Expr>& args, size_t at) {
    auto need = [&](size_t n) {
      if (args.size() != n)
        throw ParseError("function '" + name + "' expects " + std::to_string(n) +
                             " argument(s), got " + std::to_string(args.size()),
                         at);
    };
    if (name == "sin") { need(1); return Expr::sin(args[0]); }
    if (name == "cos") { need(1); return Expr::cos(args[0]); }
    if (name == "exp") { need(1); return Expr::exp(args[0]); }
    if (name == "log") { need(1); return Expr::log(args[0]); }
    if (name == "tanh") { need(1); return Expr::tanh(args[0]); }
    if (name == "relu") { need(1); return Expr::relu(args[0]); }
    if (name == "abs") {
      need(1);
      return Expr::max(args[0], Expr::mul(Expr::lit(-1.0), args[0]));
    }
    if (name == "min") { need(2); return Expr::min(args[0], args[1]); }
    if (name == "max") { need(2); return Expr::max(args[0], args[1]); }
    throw ParseError("unknown function '" + name + "'", at);
  }
};

}  // namespace

Expr parse(const std::string& text) {
  Parser p(text);
  Expr e = p.parse_expr();
  if (!p.eof()) throw ParseError("trailing input", p.pos);
  return e;
}

}  // namespace overt
