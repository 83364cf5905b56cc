// Structural recursion over canonical forms: derivative, substitution,
// free-symbol queries, simplify re-run, printing.

#include <functional>
#include <sstream>

#include "expr_detail.hpp"

namespace pgeo {

using namespace detail;

namespace {

Expr base_to_expr(const Base& b);

Expr exponent_to_expr(const Exponent& e) {
  Expr out = Expr::num(e.ratpart);
  if (e.sympart) out = out + wrap(std::make_shared<Fraction>(*e.sympart));
  return out;
}

Expr factor_to_expr(const Factor& f) {
  Expr b = base_to_expr(f.base);
  if (f.exp.rational()) return b.pow(f.exp.ratpart);
  return b.pow(exponent_to_expr(f.exp));
}

Expr term_to_expr(const Term& t) {
  Expr out = Expr::num(t.coeff);
  for (const auto& f : t.factors) out = out * factor_to_expr(f);
  return out;
}

Expr poly_to_expr(const Poly& p) {
  Expr out;
  for (const auto& t : p.terms) out = out + term_to_expr(t);
  return out;
}

Expr base_to_expr(const Base& b) {
  switch (b.kind) {
    case BaseKind::Sym: return Expr::symbol(b.name, b.positive);
    case BaseKind::Rad: return Expr::num(Rat(b.rad));
    case BaseKind::Fun: return Expr::apply(b.fn, wrap(std::make_shared<Fraction>(*b.arg)));
    case BaseKind::Poly: return poly_to_expr(*b.poly);
  }
  return Expr();
}

Expr fraction_to_expr(const Fraction& f) {
  Expr out = poly_to_expr(f.num);
  for (const auto& d : f.den) {
    Expr b = base_to_expr(d.base);
    out = out / b.pow(Rat(d.e));
  }
  return out;
}

}  // namespace

Expr simplify(const Expr& e) {
  // Rebuild through the canonical constructors; idempotent by construction.
  return fraction_to_expr(e.impl());
}

// ---------------------------------------------------------------------------
// Free symbols

namespace {

void collect_syms(const Fraction& f, std::set<std::string>& out);

void collect_syms_base(const Base& b, std::set<std::string>& out) {
  switch (b.kind) {
    case BaseKind::Sym: out.insert(b.name); break;
    case BaseKind::Rad: break;
    case BaseKind::Fun: collect_syms(*b.arg, out); break;
    case BaseKind::Poly:
      for (const auto& t : b.poly->terms)
        for (const auto& fc : t.factors) {
          collect_syms_base(fc.base, out);
          if (fc.exp.sympart) collect_syms(*fc.exp.sympart, out);
        }
      break;
  }
}

void collect_syms(const Fraction& f, std::set<std::string>& out) {
  for (const auto& t : f.num.terms)
    for (const auto& fc : t.factors) {
      collect_syms_base(fc.base, out);
      if (fc.exp.sympart) collect_syms(*fc.exp.sympart, out);
    }
  for (const auto& d : f.den) collect_syms_base(d.base, out);
}

}  // namespace

std::set<std::string> Expr::free_symbols() const {
  std::set<std::string> out;
  collect_syms(impl(), out);
  return out;
}

bool Expr::depends_on(const std::string& sym) const {
  return free_symbols().count(sym) > 0;
}

// ---------------------------------------------------------------------------
// Derivative

namespace {

Expr d_fraction(const Fraction& f, const std::string& x);

Expr d_base(const Base& b, const std::string& x) {
  switch (b.kind) {
    case BaseKind::Sym:
      return b.name == x ? Expr::integer(1) : Expr();
    case BaseKind::Rad:
      return Expr();
    case BaseKind::Fun: {
      Expr arg = wrap(std::make_shared<Fraction>(*b.arg));
      Expr darg = d_fraction(*b.arg, x);
      if (darg.is_zero()) return Expr();
      switch (b.fn) {
        case Fn::exp_: return Expr::apply(Fn::exp_, arg) * darg;
        case Fn::log_: return darg / arg;
        case Fn::sin_: return Expr::apply(Fn::cos_, arg) * darg;
        case Fn::cos_: return -(Expr::apply(Fn::sin_, arg) * darg);
        case Fn::sinh_: return Expr::apply(Fn::cosh_, arg) * darg;
        case Fn::cosh_: return Expr::apply(Fn::sinh_, arg) * darg;
        default: throw Error("derivative: unexpected function");
      }
    }
    case BaseKind::Poly: {
      Expr out;
      for (const auto& t : b.poly->terms) {
        // d(term) below needs a Fraction; reuse term_to_expr + recursion
        Fraction tf;
        tf.num.terms.push_back(t);
        out = out + d_fraction(tf, x);
      }
      return out;
    }
  }
  return Expr();
}

Expr d_term(const Term& t, const std::string& x) {
  Expr sum;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    const Factor& f = t.factors[i];
    Expr b = base_to_expr(f.base);
    Expr db = d_base(f.base, x);
    Expr de;  // derivative of the exponent
    if (f.exp.sympart) de = d_fraction(*f.exp.sympart, x);
    if (db.is_zero() && de.is_zero()) continue;

    // d(b^e) = b^e * (e' log b + e b'/b)
    Expr e_expr = exponent_to_expr(f.exp);
    Expr piece;
    if (!de.is_zero()) piece = piece + de * Expr::apply(Fn::log_, b);
    if (!db.is_zero()) piece = piece + e_expr * db / b;
    Expr rest = Expr::num(t.coeff);
    for (std::size_t j = 0; j < t.factors.size(); ++j)
      rest = rest * factor_to_expr(t.factors[j]);
    sum = sum + rest * piece;
  }
  return sum;
}

Expr d_fraction(const Fraction& f, const std::string& x) {
  Expr out;
  for (const auto& t : f.num.terms) out = out + d_term(t, x);
  if (f.den.empty()) return out;
  // f = num/D: f' = num'/D - num * D'/D^2, with D a product of powers.
  Expr deninv = Expr::integer(1);
  Expr dlogden;  // D'/D = sum e_i b_i'/b_i
  for (const auto& d : f.den) {
    Expr b = base_to_expr(d.base);
    deninv = deninv / b.pow(Rat(d.e));
    Expr db = d_base(d.base, x);
    if (!db.is_zero()) dlogden = dlogden + Expr::integer(d.e) * db / b;
  }
  Expr numex = poly_to_expr(f.num);
  return out * deninv - numex * deninv * dlogden;
}

}  // namespace

Expr Expr::derivative(const std::string& sym) const { return d_fraction(impl(), sym); }

// ---------------------------------------------------------------------------
// Substitution

namespace {

Expr sub_fraction(const Fraction& f, const std::map<std::string, Expr>& repl);

Expr sub_base(const Base& b, const std::map<std::string, Expr>& repl) {
  switch (b.kind) {
    case BaseKind::Sym: {
      auto it = repl.find(b.name);
      if (it != repl.end()) return it->second;
      return Expr::symbol(b.name, b.positive);
    }
    case BaseKind::Rad:
      return Expr::num(Rat(b.rad));
    case BaseKind::Fun:
      return Expr::apply(b.fn, sub_fraction(*b.arg, repl));
    case BaseKind::Poly: {
      Expr out;
      for (const auto& t : b.poly->terms) {
        Fraction tf;
        tf.num.terms.push_back(t);
        out = out + sub_fraction(tf, repl);
      }
      return out;
    }
  }
  return Expr();
}

Expr sub_fraction(const Fraction& f, const std::map<std::string, Expr>& repl) {
  Expr out;
  for (const auto& t : f.num.terms) {
    Expr te = Expr::num(t.coeff);
    for (const auto& fc : t.factors) {
      Expr b = sub_base(fc.base, repl);
      if (fc.exp.rational()) {
        te = te * b.pow(fc.exp.ratpart);
      } else {
        Expr e = Expr::num(fc.exp.ratpart) + sub_fraction(*fc.exp.sympart, repl);
        te = te * b.pow(e);
      }
    }
    out = out + te;
  }
  for (const auto& d : f.den) {
    Expr b = sub_base(d.base, repl);
    if (b.is_zero())
      throw DomainError("substitution sends a denominator factor to zero");
    out = out / b.pow(Rat(d.e));
  }
  return out;
}

}  // namespace

Expr Expr::substitute(const std::map<std::string, Expr>& repl) const {
  if (repl.empty()) return *this;
  return sub_fraction(impl(), repl);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool needs_parens_in_product(const std::string& s) {
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if ((c == '+' || c == '-') && depth == 0) return true;
  }
  return false;
}

std::string print_fraction(const Fraction& f);

std::string print_base(const Base& b) {
  switch (b.kind) {
    case BaseKind::Sym: return b.name;
    case BaseKind::Rad: return "sqrt(" + b.rad.str() + ")";
    case BaseKind::Fun: return std::string(fn_name(b.fn)) + "(" + print_fraction(*b.arg) + ")";
    case BaseKind::Poly: {
      Fraction tmp;
      tmp.num = *b.poly;
      return "(" + print_fraction(tmp) + ")";
    }
  }
  return "?";
}

std::string print_exponent(const Exponent& e) {
  if (e.rational()) {
    if (is_integer(e.ratpart) && e.ratpart >= 0) return e.ratpart == 1 ? "" : num(e.ratpart).str();
    return "(" + rat_to_string(e.ratpart) + ")";
  }
  Fraction full = *e.sympart;
  if (e.ratpart != 0) full = *frac_add(full, *frac_rat(e.ratpart));
  return "(" + print_fraction(full) + ")";
}

std::string print_factor(const Factor& fc) {
  if (fc.base.kind == BaseKind::Rad && fc.exp.rational() && fc.exp.ratpart == Rat(1, 2))
    return "sqrt(" + fc.base.rad.str() + ")";
  if (fc.exp.rational() && fc.exp.ratpart == Rat(1, 2))
    return "sqrt(" + print_base(fc.base) + ")";
  std::string b = print_base(fc.base);
  if (fc.base.kind == BaseKind::Sym || fc.base.kind == BaseKind::Fun ||
      fc.base.kind == BaseKind::Poly) {
    // fine as-is
  }
  std::string e = print_exponent(fc.exp);
  if (e.empty()) return b;
  if (needs_parens_in_product(b)) b = "(" + b + ")";
  return b + "^" + e;
}

std::string print_term(const Term& t, bool lead) {
  std::string coeff;
  Rat c = t.coeff;
  bool neg = c < 0;
  Rat ac = neg ? -c : c;
  std::string sign = neg ? (lead ? "-" : " - ") : (lead ? "" : " + ");
  std::vector<std::string> parts;
  if (ac != 1 || t.factors.empty()) parts.push_back(rat_to_string(ac));
  for (const auto& fc : t.factors) parts.push_back(print_factor(fc));
  std::string body;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) body += "*";
    body += parts[i];
  }
  return sign + body;
}

std::string print_poly(const Poly& p) {
  if (p.zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < p.terms.size(); ++i) out += print_term(p.terms[i], i == 0);
  return out;
}

std::string print_fraction(const Fraction& f) {
  std::string numstr = print_poly(f.num);
  if (f.den.empty()) return numstr;
  std::string denstr;
  for (std::size_t i = 0; i < f.den.size(); ++i) {
    std::string b = print_base(f.den[i].base);
    // poly bases already parenthesized
    std::string piece = f.den[i].e == 1 ? b : b + "^" + std::to_string(f.den[i].e);
    if (i) denstr += "*";
    denstr += piece;
  }
  if (f.den.size() > 1) denstr = "(" + denstr + ")";
  if (needs_parens_in_product(numstr) || f.num.terms.size() > 1)
    numstr = "(" + numstr + ")";
  return numstr + "/" + denstr;
}

}  // namespace

namespace detail {
std::string fraction_to_string(const Fraction& f) { return print_fraction(f); }
}  // namespace detail

std::string Expr::str() const { return print_fraction(impl()); }

}  // namespace pgeo
