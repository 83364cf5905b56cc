// Recursive-descent parser for the expression grammar (see docs/grammar.md):
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right associative)
//   atom   := INTEGER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// Rational literals a/b come out of '/' at term level, so "1/2*x^2" is
// (1/2)*x^2.

#include <cctype>

#include "expr_detail.hpp"

namespace pgeo {

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  const ParseOptions& opts;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Expr parse_expr_() {
    Expr out = parse_term();
    while (true) {
      skip_ws();
      if (eat('+')) out = out + parse_term();
      else if (eat('-')) out = out - parse_term();
      else return out;
    }
  }

  Expr parse_term() {
    Expr out = parse_unary();
    while (true) {
      skip_ws();
      if (eat('*')) out = out * parse_unary();
      else if (eat('/')) out = out / parse_unary();
      else return out;
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (eat('^')) {
      Expr e = parse_unary();
      if (auto q = e.as_rational()) return base.pow(*q);
      return base.pow(e);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr_();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      return Expr::num(Rat(Int(s.substr(start, pos - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      if (eat('(')) {
        Expr arg = parse_expr_();
        if (!eat(')')) fail("expected ')' after function argument");
        static const std::map<std::string, Fn> fns = {
            {"exp", Fn::exp_},   {"log", Fn::log_},   {"sin", Fn::sin_},
            {"cos", Fn::cos_},   {"sinh", Fn::sinh_}, {"cosh", Fn::cosh_},
            {"tanh", Fn::tanh_}, {"sqrt", Fn::sqrt_}};
        auto it = fns.find(name);
        if (it == fns.end()) {
          pos = start;
          fail("unknown function '" + name + "'");
        }
        return Expr::apply(it->second, arg);
      }
      if (!opts.allowed.empty() && !opts.allowed.count(name)) {
        pos = start;
        fail("unknown symbol '" + name + "'");
      }
      return Expr::symbol(name, opts.positive.count(name) > 0);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expr parse_expr(const std::string& text, const ParseOptions& opts) {
  Parser p{text, 0, opts};
  Expr e = p.parse_expr_();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace pgeo
