#include <algorithm>
#include <cassert>
#include <map>
#include <optional>

#include "expr_detail.hpp"

namespace pgeo {

namespace {
thread_local std::size_t g_budget = 400000;
}

void set_simplify_budget(std::size_t max_terms) { g_budget = max_terms; }
std::size_t simplify_budget() { return g_budget; }

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::exp_: return "exp";
    case Fn::log_: return "log";
    case Fn::sin_: return "sin";
    case Fn::cos_: return "cos";
    case Fn::sinh_: return "sinh";
    case Fn::cosh_: return "cosh";
    case Fn::tanh_: return "tanh";
    case Fn::sqrt_: return "sqrt";
  }
  return "?";
}

namespace detail {

void budget_check(std::size_t n) {
  if (n > g_budget)
    throw BudgetExceeded("expression exceeded simplify budget of " +
                         std::to_string(g_budget) + " terms");
}

// ---------------------------------------------------------------------------
// Orderings

int cmp_rat(const Rat& a, const Rat& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

static int cmp_int(const Int& a, const Int& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int cmp_base(const Base& a, const Base& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case BaseKind::Sym:
      if (a.name != b.name) return a.name < b.name ? -1 : 1;
      return 0;
    case BaseKind::Rad:
      return cmp_int(a.rad, b.rad);
    case BaseKind::Fun:
      if (a.fn != b.fn) return a.fn < b.fn ? -1 : 1;
      return cmp_fraction(*a.arg, *b.arg);
    case BaseKind::Poly:
      return cmp_poly(*a.poly, *b.poly);
  }
  return 0;
}

int cmp_exponent(const Exponent& a, const Exponent& b) {
  int c = cmp_rat(a.ratpart, b.ratpart);
  if (c) return c;
  if (!a.sympart && !b.sympart) return 0;
  if (!a.sympart) return -1;
  if (!b.sympart) return 1;
  return cmp_fraction(*a.sympart, *b.sympart);
}

static Rat monomial_degree(const Term& t) {
  Rat d(0);
  for (const auto& f : t.factors) d += f.exp.ratpart;
  return d;
}

int cmp_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp_base(a[i].base, b[i].base);
    if (c) return c;
    c = cmp_exponent(a[i].exp, b[i].exp);
    if (c) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

// Graded (total rational degree, descending) then lexicographic.
int cmp_term_monomial(const Term& a, const Term& b) {
  int c = cmp_rat(monomial_degree(b), monomial_degree(a));
  if (c) return c;
  return cmp_factors(a.factors, b.factors);
}

int cmp_poly(const Poly& a, const Poly& b) {
  std::size_t n = std::min(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp_term_monomial(a.terms[i], b.terms[i]);
    if (c) return c;
    c = cmp_rat(a.terms[i].coeff, b.terms[i].coeff);
    if (c) return c;
  }
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

int cmp_fraction(const Fraction& a, const Fraction& b) {
  int c = cmp_poly(a.num, b.num);
  if (c) return c;
  std::size_t n = std::min(a.den.size(), b.den.size());
  for (std::size_t i = 0; i < n; ++i) {
    c = cmp_base(a.den[i].base, b.den[i].base);
    if (c) return c;
    if (a.den[i].e != b.den[i].e) return a.den[i].e < b.den[i].e ? -1 : 1;
  }
  if (a.den.size() != b.den.size()) return a.den.size() < b.den.size() ? -1 : 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Positivity

bool base_provably_positive(const Base& b) {
  switch (b.kind) {
    case BaseKind::Sym: return b.positive;
    case BaseKind::Rad: return true;
    case BaseKind::Fun: return b.fn == Fn::exp_ || b.fn == Fn::cosh_;
    case BaseKind::Poly: return poly_provably_nonneg(*b.poly) && !b.poly->zero();
  }
  return false;
}

bool poly_provably_nonneg(const Poly& p) {
  for (const auto& t : p.terms) {
    if (t.coeff < 0) return false;
    for (const auto& f : t.factors) {
      bool even = f.exp.rational() && is_integer(f.exp.ratpart) &&
                  num(f.exp.ratpart) % 2 == 0;
      if (!even && !base_provably_positive(f.base)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Poly arithmetic

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out;
  out.terms.reserve(a.terms.size() + b.terms.size());
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    int c = cmp_term_monomial(a.terms[i], b.terms[j]);
    if (c < 0) {
      out.terms.push_back(a.terms[i++]);
    } else if (c > 0) {
      out.terms.push_back(b.terms[j++]);
    } else {
      Term t = a.terms[i++];
      t.coeff += b.terms[j++].coeff;
      if (t.coeff != 0) out.terms.push_back(std::move(t));
    }
  }
  while (i < a.terms.size()) out.terms.push_back(a.terms[i++]);
  while (j < b.terms.size()) out.terms.push_back(b.terms[j++]);
  budget_check(out.terms.size());
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out = a;
  for (auto& t : out.terms) t.coeff = -t.coeff;
  return out;
}

Poly poly_scale(const Poly& a, const Rat& s) {
  if (s == 0) return Poly{};
  Poly out = a;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly acc;
  for (const auto& ta : a.terms) {
    Poly row;
    for (const auto& tb : b.terms) {
      row = poly_add(row, term_mul(ta, tb));
    }
    acc = poly_add(acc, row);
    budget_check(acc.terms.size() * (1 + b.terms.size() / 4));
  }
  return acc;
}

Poly poly_pow_int(const Poly& a, unsigned long k) {
  Poly out;
  out.terms.push_back(Term{});  // 1
  Poly base = a;
  while (k) {
    if (k & 1) out = poly_mul(out, base);
    k >>= 1;
    if (k) base = poly_mul(base, base);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponent arithmetic

static Exponent exp_rat(Rat q) { return Exponent{std::move(q), nullptr}; }

static Exponent exp_add(const Exponent& a, const Exponent& b) {
  Exponent out;
  out.ratpart = a.ratpart + b.ratpart;
  if (a.sympart && b.sympart) {
    FracPtr s = frac_add(*a.sympart, *b.sympart);
    Rat q;
    if (frac_is_rat(*s, &q)) {
      out.ratpart += q;
    } else {
      out.sympart = s;
    }
  } else if (a.sympart) {
    out.sympart = a.sympart;
  } else if (b.sympart) {
    out.sympart = b.sympart;
  }
  return out;
}

static bool exp_is_zero(const Exponent& e) { return !e.sympart && e.ratpart == 0; }

// Splits a canonical fraction into rational constant + rest (rest has no
// pure-number term when den is trivial).
static Exponent make_exponent(const Fraction& f) {
  Exponent out;
  if (f.den.empty()) {
    Poly rest;
    for (const auto& t : f.num.terms) {
      if (t.factors.empty())
        out.ratpart += t.coeff;
      else
        rest.terms.push_back(t);
    }
    if (!rest.zero()) {
      auto fr = std::make_shared<Fraction>();
      fr->num = std::move(rest);
      out.sympart = fr;
    }
  } else {
    Rat q;
    if (frac_is_rat(f, &q)) {
      out.ratpart = q;
    } else {
      out.sympart = std::make_shared<Fraction>(f);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term normalization

namespace {

struct FactorCmp {
  bool operator()(const Base& a, const Base& b) const { return cmp_base(a, b) < 0; }
};

bool is_int_ge2(const Exponent& e) {
  return e.rational() && is_integer(e.ratpart) && e.ratpart >= 2;
}

}  // namespace

Poly normalize_term(Rat coeff, std::vector<Factor> raw) {
  if (coeff == 0) return Poly{};

  // Collect by base.
  std::map<Base, Exponent, FactorCmp> collected;
  // exp() atoms merge through their arguments.
  FracPtr exp_arg;

  std::vector<Factor> queue = std::move(raw);
  Int rad_acc(1);  // product of radicands pending sqrt

  while (!queue.empty()) {
    Factor f = std::move(queue.back());
    queue.pop_back();
    if (exp_is_zero(f.exp)) continue;

    if (f.base.kind == BaseKind::Rad) {
      // exponent must be rational k/2; fold integer part into coeff.
      if (!f.exp.rational())
        throw UnsupportedError("symbolic power of an integer radical");
      Rat e = f.exp.ratpart;
      Rat twice = e * 2;
      if (!is_integer(twice))
        throw UnsupportedError("radical with exponent of denominator > 2");
      Int k = num(twice);  // e = k/2
      Int whole = k / 2;   // floor toward zero ok: handle negatives below
      // Normalize so the leftover is 0 or 1/2.
      Rat rem = e - Rat(whole);
      if (rem < 0) {
        whole -= 1;
        rem += 1;
      }
      if (whole != 0) {
        Rat scale = rat_pow(Rat(f.base.rad), static_cast<long>(whole));
        coeff *= scale;
      }
      if (rem == Rat(1, 2)) rad_acc *= f.base.rad;
      continue;
    }

    if (f.base.kind == BaseKind::Fun && f.base.fn == Fn::exp_) {
      // exp(a)^e -> exp(e*a)
      FracPtr scaled;
      if (f.exp.rational()) {
        scaled = frac_mul(*f.base.arg, *frac_rat(f.exp.ratpart));
      } else {
        Fraction e_full = *f.exp.sympart;
        if (f.exp.ratpart != 0) e_full = *frac_add(e_full, *frac_rat(f.exp.ratpart));
        scaled = frac_mul(*f.base.arg, e_full);
      }
      if (!frac_is_zero(*scaled)) {
        exp_arg = exp_arg ? frac_add(*exp_arg, *scaled) : scaled;
      }
      continue;
    }

    auto it = collected.find(f.base);
    if (it == collected.end()) {
      collected.emplace(f.base, f.exp);
    } else {
      it->second = exp_add(it->second, f.exp);
    }
  }

  if (rad_acc > 1) {
    auto sf = squarefree_split(rad_acc);
    coeff *= Rat(sf.square_root);
    if (sf.radicand > 1) {
      Base b;
      b.kind = BaseKind::Rad;
      b.rad = sf.radicand;
      auto it = collected.find(b);
      if (it == collected.end()) {
        collected.emplace(b, exp_rat(Rat(1, 2)));
      } else {
        // Shouldn't happen (rads were drained), but fold anyway.
        it->second = exp_add(it->second, exp_rat(Rat(1, 2)));
      }
    }
  }
  if (exp_arg && !frac_is_zero(*exp_arg)) {
    Base b;
    b.kind = BaseKind::Fun;
    b.fn = Fn::exp_;
    b.arg = exp_arg;
    collected.emplace(b, exp_rat(Rat(1)));
  }

  // Detect factors needing expansion: cosh^k, sin^k with integer k >= 2 or
  // poly bases with positive integer exponent.
  std::optional<std::pair<Base, Exponent>> expand;
  Term plain;
  plain.coeff = coeff;
  for (auto& [base, e] : collected) {
    if (exp_is_zero(e)) continue;
    if (e.rational() && e.ratpart == 0) continue;
    bool needs_expand = false;
    if (base.kind == BaseKind::Fun && (base.fn == Fn::cosh_ || base.fn == Fn::sin_) &&
        is_int_ge2(e))
      needs_expand = true;
    if (base.kind == BaseKind::Poly && e.rational() && is_integer(e.ratpart) &&
        e.ratpart >= 1)
      needs_expand = true;
    if (needs_expand && !expand) {
      expand = {base, e};
      continue;
    }
    plain.factors.push_back(Factor{base, e});
  }

  if (!expand) {
    Poly out;
    out.terms.push_back(std::move(plain));
    return out;
  }

  // Expand the flagged factor and remultiply (recursion terminates: each pass
  // removes one expandable factor).
  const Base& b = expand->first;
  Rat e = expand->second.ratpart;
  unsigned long k = static_cast<unsigned long>(num(e));
  Poly expanded;
  if (b.kind == BaseKind::Poly) {
    expanded = poly_pow_int(*b.poly, k);
  } else {
    // cosh(A)^k -> (1+sinh(A)^2)^(k/2) * cosh(A)^(k%2); sin likewise.
    unsigned long half = k / 2;
    unsigned long rem = k % 2;
    Base odd;  // sinh(A) resp. cos(A)
    odd.kind = BaseKind::Fun;
    odd.arg = b.arg;
    Rat sign(1);
    if (b.fn == Fn::cosh_) {
      odd.fn = Fn::sinh_;
      sign = 1;  // cosh^2 = 1 + sinh^2
    } else {
      odd.fn = Fn::cos_;
      sign = -1;  // sin^2 = 1 - cos^2
    }
    Poly pyth;
    pyth.terms.push_back(Term{});  // 1
    Term sq;
    sq.coeff = sign;
    sq.factors.push_back(Factor{odd, exp_rat(Rat(2))});
    pyth = poly_add(pyth, Poly{{sq}});
    expanded = poly_pow_int(pyth, half);
    if (rem) {
      Term keep;
      keep.coeff = 1;
      keep.factors.push_back(Factor{b, exp_rat(Rat(1))});
      expanded = poly_mul(expanded, Poly{{keep}});
    }
  }

  Poly rest;
  rest.terms.push_back(std::move(plain));
  return poly_mul(rest, expanded);
}

Poly term_mul(const Term& a, const Term& b) {
  std::vector<Factor> fs = a.factors;
  fs.insert(fs.end(), b.factors.begin(), b.factors.end());
  return normalize_term(a.coeff * b.coeff, std::move(fs));
}

// ---------------------------------------------------------------------------
// Fraction normalization

namespace {

// Smallest positive rational s such that p/s has integer coefficients with
// gcd 1; also flips sign so the leading term is positive. Returns the scale
// that was removed (p_normalized = p / scale).
Rat poly_extract_content(Poly& p) {
  if (p.zero()) return Rat(1);
  Int g(0), l(1);
  for (const auto& t : p.terms) {
    g = boost::multiprecision::gcd(g, num(t.coeff));
    l = boost::multiprecision::lcm(l, den(t.coeff));
  }
  Rat scale(g, l);
  if (p.terms.front().coeff < 0) scale = -scale;
  if (scale != 1) {
    for (auto& t : p.terms) t.coeff /= scale;
  }
  return scale;
}

void sort_den(std::vector<DenFactor>& den) {
  std::sort(den.begin(), den.end(), [](const DenFactor& a, const DenFactor& b) {
    return cmp_base(a.base, b.base) < 0;
  });
}

// Merge duplicate den bases.
void merge_den(std::vector<DenFactor>& den) {
  sort_den(den);
  std::vector<DenFactor> out;
  for (auto& d : den) {
    if (!out.empty() && cmp_base(out.back().base, d.base) == 0)
      out.back().e += d.e;
    else
      out.push_back(d);
  }
  den = std::move(out);
}

// How much of base^1 can be cancelled from term t (rational availability;
// symbolic exponents give unbounded availability).
std::optional<Rat> term_availability(const Term& t, const Base& b) {
  for (const auto& f : t.factors) {
    if (cmp_base(f.base, b) == 0) {
      if (!f.exp.rational()) return std::nullopt;  // unbounded
      return f.exp.ratpart;
    }
  }
  return Rat(0);
}

void term_reduce_power(Term& t, const Base& b, long k) {
  for (auto& f : t.factors) {
    if (cmp_base(f.base, b) == 0) {
      f.exp.ratpart -= k;
      if (exp_is_zero(f.exp)) {
        t.factors.erase(std::remove_if(t.factors.begin(), t.factors.end(),
                                       [&](const Factor& g) {
                                         return exp_is_zero(g.exp);
                                       }),
                        t.factors.end());
      }
      return;
    }
  }
  assert(k == 0);
}

Poly poly_sorted(Poly p) {
  std::sort(p.terms.begin(), p.terms.end(), [](const Term& a, const Term& b) {
    return cmp_term_monomial(a, b) < 0;
  });
  return p;
}

}  // namespace

std::optional<Poly> poly_divide_exact(const Poly& p, const Poly& d) {
  if (d.zero()) return std::nullopt;
  Poly rem = p;
  Poly quo;
  std::size_t guard = 4 * (p.terms.size() + 4) * (d.terms.size() + 4);
  while (!rem.zero()) {
    if (guard-- == 0) return std::nullopt;
    const Term& lr = rem.terms.front();
    const Term& ld = d.terms.front();
    // monomial quotient lr/ld
    Term q;
    q.coeff = lr.coeff / ld.coeff;
    std::vector<Factor> fs = lr.factors;
    bool ok = true;
    for (const auto& fd : ld.factors) {
      bool found = false;
      for (auto& fr : fs) {
        if (cmp_base(fr.base, fd.base) == 0) {
          found = true;
          if (!fd.exp.rational()) { ok = false; break; }
          if (!fr.exp.rational()) {
            fr.exp.ratpart -= fd.exp.ratpart;  // symbolic exponent absorbs
          } else {
            fr.exp.ratpart -= fd.exp.ratpart;
            if (fr.exp.ratpart < 0) { ok = false; }
          }
          break;
        }
      }
      if (!found) ok = false;
      if (!ok) break;
    }
    if (!ok) return std::nullopt;
    Poly qt = normalize_term(q.coeff, std::move(fs));
    if (qt.terms.size() != 1) return std::nullopt;
    quo = poly_add(quo, qt);
    Poly sub = poly_mul(qt, d);
    rem = poly_add(rem, poly_neg(sub));
  }
  return quo;
}

namespace {

// Move radicals / exp-atoms / even cosh,sin powers out of the denominator and
// apply numerator-denominator cancellation. `extra_num` accumulates factors
// that must be multiplied into num.
void normalize_fraction_inplace(Fraction& f) {
  if (f.num.zero()) {
    f.den.clear();
    return;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    merge_den(f.den);
    std::vector<DenFactor> keep;
    for (auto& d : f.den) {
      if (d.e == 0) { changed = true; continue; }
      if (d.base.kind == BaseKind::Rad) {
        // 1/sqrt(r)^e: multiply num by sqrt(r)^e, den by r^e.
        Term t;
        t.coeff = 1;
        t.factors.push_back(Factor{d.base, exp_rat(Rat(d.e))});
        Poly mul = normalize_term(Rat(1), t.factors);
        f.num = poly_mul(f.num, mul);
        f.num = poly_scale(f.num, Rat(1) / rat_pow(Rat(d.base.rad), d.e));
        changed = true;
        continue;
      }
      if (d.base.kind == BaseKind::Fun && d.base.fn == Fn::exp_) {
        // 1/exp(a)^e = exp(-e a)
        Fraction marg = *frac_mul(*d.base.arg, *frac_rat(Rat(-(long long)d.e)));
        Base nb;
        nb.kind = BaseKind::Fun;
        nb.fn = Fn::exp_;
        nb.arg = std::make_shared<Fraction>(marg);
        Poly mul;
        Term t;
        t.factors.push_back(Factor{nb, exp_rat(Rat(1))});
        mul.terms.push_back(t);
        f.num = poly_mul(f.num, mul);
        changed = true;
        continue;
      }
      if (d.base.kind == BaseKind::Fun &&
          (d.base.fn == Fn::cosh_ || d.base.fn == Fn::sin_) && d.e >= 2) {
        long half = d.e / 2;
        long rem = d.e % 2;
        Poly pyth;
        pyth.terms.push_back(Term{});
        Base odd;
        odd.kind = BaseKind::Fun;
        odd.arg = d.base.arg;
        Term sq;
        sq.factors.push_back(Factor{odd, exp_rat(Rat(2))});
        if (d.base.fn == Fn::cosh_) {
          odd.fn = Fn::sinh_;
          sq.coeff = 1;
        } else {
          odd.fn = Fn::cos_;
          sq.coeff = -1;
        }
        sq.factors.front().base = odd;
        pyth = poly_add(pyth, Poly{{sq}});
        Base pb;
        pb.kind = BaseKind::Poly;
        pb.poly = std::make_shared<Poly>(poly_sorted(pyth));
        keep.push_back(DenFactor{pb, half});
        if (rem) keep.push_back(DenFactor{d.base, 1});
        changed = true;
        continue;
      }
      keep.push_back(d);
    }
    f.den = std::move(keep);
    merge_den(f.den);

    // Cancellation.
    for (auto& d : f.den) {
      if (d.e == 0) continue;
      if (d.base.kind == BaseKind::Poly) {
        while (d.e > 0) {
          auto q = poly_divide_exact(f.num, *d.base.poly);
          if (!q) break;
          f.num = *q;
          d.e -= 1;
          changed = true;
        }
      } else {
        // min availability over terms
        Rat avail;
        bool unbounded = true;
        bool first = true;
        for (const auto& t : f.num.terms) {
          auto a = term_availability(t, d.base);
          if (!a) continue;  // symbolic: unbounded
          if (first || *a < avail) avail = *a;
          first = false;
          unbounded = false;
        }
        long k = 0;
        if (unbounded) {
          k = d.e;
        } else if (avail >= 1) {
          Int fl = num(avail) / den(avail);
          k = std::min<long>(d.e, static_cast<long>(fl));
        }
        if (k > 0) {
          for (auto& t : f.num.terms) term_reduce_power(t, d.base, k);
          f.num = poly_sorted(f.num);
          d.e -= k;
          changed = true;
        }
      }
    }
    f.den.erase(std::remove_if(f.den.begin(), f.den.end(),
                               [](const DenFactor& d) { return d.e == 0; }),
                f.den.end());
    if (f.num.zero()) {
      f.den.clear();
      return;
    }
  }
  sort_den(f.den);
}

FracPtr make_frac(Poly num, std::vector<DenFactor> den) {
  auto f = std::make_shared<Fraction>();
  f->num = std::move(num);
  f->den = std::move(den);
  normalize_fraction_inplace(*f);
  return f;
}

// den factor -> poly representation (for cross multiplication in adds)
Poly den_factor_poly(const DenFactor& d) {
  if (d.base.kind == BaseKind::Poly) return poly_pow_int(*d.base.poly, d.e);
  Term t;
  t.coeff = 1;
  t.factors.push_back(Factor{d.base, exp_rat(Rat(d.e))});
  return normalize_term(Rat(1), t.factors);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public fraction ops

FracPtr frac_zero() {
  static FracPtr z = std::make_shared<Fraction>();
  return z;
}

FracPtr frac_rat(const Rat& q) {
  auto f = std::make_shared<Fraction>();
  if (q != 0) {
    Term t;
    t.coeff = q;
    f->num.terms.push_back(std::move(t));
  }
  return f;
}

FracPtr frac_symbol(const std::string& name, bool positive) {
  auto f = std::make_shared<Fraction>();
  Base b;
  b.kind = BaseKind::Sym;
  b.name = name;
  b.positive = positive;
  Term t;
  t.factors.push_back(Factor{b, exp_rat(Rat(1))});
  f->num.terms.push_back(std::move(t));
  return f;
}

FracPtr frac_from_poly(Poly p) { return make_frac(poly_sorted(std::move(p)), {}); }

bool frac_is_zero(const Fraction& f) { return f.num.zero(); }

bool frac_is_rat(const Fraction& f, Rat* out) {
  if (!f.den.empty()) return false;
  if (f.num.zero()) {
    if (out) *out = 0;
    return true;
  }
  if (f.num.terms.size() == 1 && f.num.terms.front().factors.empty()) {
    if (out) *out = f.num.terms.front().coeff;
    return true;
  }
  return false;
}

FracPtr frac_neg(const Fraction& a) {
  auto f = std::make_shared<Fraction>();
  f->num = poly_neg(a.num);
  f->den = a.den;
  return f;
}

FracPtr frac_add(const Fraction& a, const Fraction& b) {
  if (frac_is_zero(a)) return std::make_shared<Fraction>(b);
  if (frac_is_zero(b)) return std::make_shared<Fraction>(a);

  // lcm of dens
  std::vector<DenFactor> lcm;
  std::size_t i = 0, j = 0;
  while (i < a.den.size() || j < b.den.size()) {
    if (i < a.den.size() && j < b.den.size()) {
      int c = cmp_base(a.den[i].base, b.den[j].base);
      if (c < 0) lcm.push_back(a.den[i++]);
      else if (c > 0) lcm.push_back(b.den[j++]);
      else {
        DenFactor d = a.den[i];
        d.e = std::max(a.den[i].e, b.den[j].e);
        lcm.push_back(d);
        ++i; ++j;
      }
    } else if (i < a.den.size()) lcm.push_back(a.den[i++]);
    else lcm.push_back(b.den[j++]);
  }

  auto complement = [&](const Fraction& x) {
    Poly out = x.num;
    for (const auto& d : lcm) {
      long have = 0;
      for (const auto& xd : x.den)
        if (cmp_base(xd.base, d.base) == 0) { have = xd.e; break; }
      if (d.e > have) {
        DenFactor extra{d.base, d.e - have};
        out = poly_mul(out, den_factor_poly(extra));
      }
    }
    return out;
  };

  Poly numa = complement(a);
  Poly numb = complement(b);
  return make_frac(poly_add(numa, numb), std::move(lcm));
}

FracPtr frac_mul(const Fraction& a, const Fraction& b) {
  if (frac_is_zero(a) || frac_is_zero(b)) return frac_zero();
  std::vector<DenFactor> den = a.den;
  den.insert(den.end(), b.den.begin(), b.den.end());
  return make_frac(poly_mul(a.num, b.num), std::move(den));
}

namespace {

// Inverse of a single canonical term (coeff and factors flipped).
void invert_term_into(const Term& t, Rat& coeff, std::vector<Factor>& numf,
                      std::vector<DenFactor>& denf) {
  coeff /= t.coeff;
  for (const auto& f : t.factors) {
    if (!f.exp.rational()) {
      Exponent e;
      e.ratpart = -f.exp.ratpart;
      e.sympart = frac_neg(*f.exp.sympart);
      numf.push_back(Factor{f.base, e});
      continue;
    }
    Rat e = -f.exp.ratpart;  // negative now
    if (is_integer(e)) {
      denf.push_back(DenFactor{f.base, static_cast<long>(num(-e))});
    } else {
      // e = -p/q < 0: base^e = base^(e+ceil(-e)) / base^(ceil(-e))
      Int c = num(-e) / den(-e);
      if (Rat(c) < -e) c += 1;
      Rat frac_part = e + Rat(c);
      denf.push_back(DenFactor{f.base, static_cast<long>(c)});
      if (frac_part != 0) numf.push_back(Factor{f.base, exp_rat(frac_part)});
    }
  }
}

}  // namespace

FracPtr frac_div(const Fraction& a, const Fraction& b) {
  if (frac_is_zero(b)) throw DomainError("division by zero expression");
  if (frac_is_zero(a)) return frac_zero();

  // numerator of result: a.num * b.den-as-poly
  Poly num = a.num;
  for (const auto& d : b.den) num = poly_mul(num, den_factor_poly(d));
  std::vector<DenFactor> den = a.den;

  if (b.num.terms.size() == 1) {
    Rat coeff(1);
    std::vector<Factor> numf;
    invert_term_into(b.num.terms.front(), coeff, numf, den);
    Poly mul = normalize_term(coeff, std::move(numf));
    num = poly_mul(num, mul);
  } else {
    Poly base = b.num;
    Rat content = poly_extract_content(base);
    num = poly_scale(num, Rat(1) / content);
    Base pb;
    pb.kind = BaseKind::Poly;
    pb.poly = std::make_shared<Poly>(std::move(base));
    den.push_back(DenFactor{pb, 1});
  }
  return make_frac(std::move(num), std::move(den));
}

FracPtr frac_pow_rat(const Fraction& a, const Rat& k) {
  if (k == 0) {
    if (frac_is_zero(a)) return frac_rat(1);  // 0^0 := 1 (empty product)
    return frac_rat(1);
  }
  if (frac_is_zero(a)) {
    if (k < 0) throw DomainError("zero raised to a negative power");
    return frac_zero();
  }
  if (k == 1) return std::make_shared<Fraction>(a);

  if (is_integer(k)) {
    long e = static_cast<long>(num(k));
    bool neg = e < 0;
    unsigned long m = neg ? -e : e;
    Poly pnum = poly_pow_int(a.num, m);
    std::vector<DenFactor> den;
    for (const auto& d : a.den) den.push_back(DenFactor{d.base, d.e * (long)m});
    FracPtr p = make_frac(std::move(pnum), std::move(den));
    if (!neg) return p;
    return frac_div(*frac_rat(1), *p);
  }

  // Fractional power.
  if (k < 0) {
    FracPtr inv = frac_div(*frac_rat(1), a);
    return frac_pow_rat(*inv, -k);
  }

  // k = p/q > 0, non-integer.
  // Single-term numerators: exponentiate factorwise.
  if (a.num.terms.size() == 1) {
    const Term& t = a.num.terms.front();
    Rat coeff_pow(1);
    std::vector<Factor> fs;
    // coefficient
    Rat c = t.coeff;
    if (c < 0) throw DomainError("fractional power of a negative quantity");
    if (c != 1) {
      // c^k with k = p/q: exact root or radical (q == 2) else unsupported.
      Int p = pgeo::num(k), q = pgeo::den(k);
      Rat cp = rat_pow(c, static_cast<long>(p));
      // try exact q-th root of cp = n/d
      auto iroot = [](const Int& n, const Int& q) -> std::optional<Int> {
        if (n == 0) return Int(0);
        if (n == 1) return Int(1);
        Int lo = 1, hi = n;
        while (lo < hi) {
          Int mid = (lo + hi) / 2;
          Int mp = 1;
          bool over = false;
          for (Int e = 0; e < q; ++e) {
            mp *= mid;
            if (mp > n) { over = true; break; }
          }
          if (over) hi = mid - 1 >= lo ? mid - 1 : lo;
          else if (mp == n) return mid;
          else lo = mid + 1;
        }
        Int mp = 1;
        for (Int e = 0; e < q; ++e) mp *= lo;
        if (mp == n) return lo;
        return std::nullopt;
      };
      auto rn = iroot(num(cp), q);
      auto rd = iroot(den(cp), q);
      if (rn && rd) {
        coeff_pow = Rat(*rn, *rd);
      } else if (q == 2) {
        // sqrt(n/d) = sqrt(n*d)/d
        auto sf = squarefree_split(num(cp) * den(cp));
        coeff_pow = Rat(sf.square_root, den(cp));
        if (sf.radicand > 1) {
          Base rb;
          rb.kind = BaseKind::Rad;
          rb.rad = sf.radicand;
          fs.push_back(Factor{rb, exp_rat(Rat(1, 2))});
        }
      } else {
        throw UnsupportedError("non-square root of a rational constant");
      }
    }
    for (const auto& f : t.factors) {
      // No |x| in the scalar field: fractional powers only of provably
      // positive bases (sqrt(x^2) is rejected, not folded to x).
      if (!base_provably_positive(f.base))
        throw DomainError("fractional power of a quantity of unknown sign: " +
                          fraction_to_string(a));
      Exponent e;
      e.ratpart = f.exp.ratpart * k;
      if (f.exp.sympart) {
        FracPtr s = frac_mul(*f.exp.sympart, *frac_rat(k));
        Exponent tmp = make_exponent(*s);
        e.ratpart += tmp.ratpart;
        e.sympart = tmp.sympart;
      }
      fs.push_back(Factor{f.base, e});
    }
    Poly pn = normalize_term(coeff_pow, std::move(fs));
    FracPtr base = make_frac(std::move(pn), {});
    if (a.den.empty()) return base;
    // (t/den)^k = t^k * den^-k
    Fraction deninv;
    deninv.num.terms.push_back(Term{});
    for (const auto& d : a.den) {
      Fraction df;
      Term dt;
      if (d.base.kind == BaseKind::Poly) {
        df.num = *d.base.poly;
      } else {
        dt.factors.push_back(Factor{d.base, exp_rat(Rat(1))});
        df.num.terms.push_back(dt);
      }
      FracPtr dpow = frac_pow_rat(df, -k * d.e);
      deninv = *frac_mul(deninv, *dpow);
    }
    return frac_mul(*base, deninv);
  }

  // Multi-term: keep as a poly-power atom; requires provable nonnegativity.
  if (!a.den.empty()) {
    // (num/den)^k = num^k / den^k
    Fraction numonly;
    numonly.num = a.num;
    FracPtr np = frac_pow_rat(numonly, k);
    Fraction deninv;
    deninv.num.terms.push_back(Term{});
    for (const auto& d : a.den) {
      Fraction df;
      if (d.base.kind == BaseKind::Poly) {
        df.num = *d.base.poly;
      } else {
        Term dt;
        dt.factors.push_back(Factor{d.base, exp_rat(Rat(1))});
        df.num.terms.push_back(dt);
      }
      deninv = *frac_mul(deninv, *frac_pow_rat(df, -k * d.e));
    }
    return frac_mul(*np, deninv);
  }
  Poly base = a.num;
  if (!poly_provably_nonneg(base))
    throw DomainError("fractional power of a sum of unknown sign");
  Rat content = poly_extract_content(base);
  Base pb;
  pb.kind = BaseKind::Poly;
  pb.poly = std::make_shared<Poly>(std::move(base));
  std::vector<Factor> fs{Factor{pb, exp_rat(k)}};
  Fraction scale = *frac_pow_rat(*frac_rat(content), k);
  return frac_mul(*make_frac(normalize_term(Rat(1), std::move(fs)), {}), scale);
}

FracPtr frac_pow_sym(const Fraction& a, const Fraction& k) {
  Rat kq;
  if (frac_is_rat(k, &kq)) return frac_pow_rat(a, kq);
  Rat aq;
  if (frac_is_rat(a, &aq)) {
    if (aq == 1) return frac_rat(1);
    throw UnsupportedError("symbolic power of a rational base");
  }
  if (!a.den.empty() || a.num.terms.size() != 1)
    throw UnsupportedError("symbolic power of a composite expression");
  const Term& t = a.num.terms.front();
  if (t.coeff != 1)
    throw UnsupportedError("symbolic power of a scaled expression");
  Exponent ke = make_exponent(k);
  std::vector<Factor> fs;
  for (const auto& f : t.factors) {
    if (f.base.kind != BaseKind::Fun || f.base.fn != Fn::exp_) {
      if (!base_provably_positive(f.base))
        throw DomainError("symbolic power of a quantity of unknown sign");
    }
    // (base^e)^k
    Fraction efull = f.exp.sympart ? *f.exp.sympart : Fraction{};
    if (f.exp.ratpart != 0) efull = *frac_add(efull, *frac_rat(f.exp.ratpart));
    Fraction prod = *frac_mul(efull, k);
    Exponent e = make_exponent(prod);
    fs.push_back(Factor{f.base, e});
  }
  return make_frac(normalize_term(Rat(1), std::move(fs)), {});
}

FracPtr frac_apply(Fn fn, const Fraction& arg) {
  if (fn == Fn::sqrt_) return frac_pow_rat(arg, Rat(1, 2));
  if (fn == Fn::tanh_) {
    FracPtr s = frac_apply(Fn::sinh_, arg);
    FracPtr c = frac_apply(Fn::cosh_, arg);
    return frac_div(*s, *c);
  }
  Rat q;
  bool is_rat = frac_is_rat(arg, &q);
  if (is_rat && q == 0) {
    switch (fn) {
      case Fn::exp_: return frac_rat(1);
      case Fn::log_: throw DomainError("log(0)");
      case Fn::sin_: case Fn::sinh_: return frac_zero();
      case Fn::cos_: case Fn::cosh_: return frac_rat(1);
      default: break;
    }
  }
  if (fn == Fn::log_) {
    if (is_rat) {
      if (q <= 0) throw DomainError("log of a non-positive constant");
      if (q == 1) return frac_zero();
    }
  }
  Fraction a = arg;
  Rat sign(1);
  if (fn == Fn::sin_ || fn == Fn::cos_ || fn == Fn::sinh_ || fn == Fn::cosh_) {
    // normalize argument sign: leading coefficient positive
    if (!a.num.zero() && a.num.terms.front().coeff < 0) {
      a = *frac_neg(a);
      if (fn == Fn::sin_ || fn == Fn::sinh_) sign = -1;
    }
  }
  Base b;
  b.kind = BaseKind::Fun;
  b.fn = fn;
  b.arg = std::make_shared<Fraction>(std::move(a));
  std::vector<Factor> fs{Factor{b, exp_rat(Rat(1))}};
  return make_frac(normalize_term(sign, std::move(fs)), {});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Expr façade

using namespace detail;

Expr::Expr() : impl_(frac_zero()) {}

Expr Expr::num(Rat q) { return wrap(frac_rat(q)); }

Expr Expr::symbol(const std::string& name, bool positive) {
  if (name.empty()) throw Error("empty symbol name");
  return wrap(frac_symbol(name, positive));
}

Expr Expr::apply(Fn f, const Expr& arg) { return wrap(frac_apply(f, arg.impl())); }

Expr Expr::operator-() const { return wrap(frac_neg(impl())); }

Expr operator+(const Expr& a, const Expr& b) { return wrap(frac_add(a.impl(), b.impl())); }
Expr operator-(const Expr& a, const Expr& b) {
  return wrap(frac_add(a.impl(), *frac_neg(b.impl())));
}
Expr operator*(const Expr& a, const Expr& b) { return wrap(frac_mul(a.impl(), b.impl())); }
Expr operator/(const Expr& a, const Expr& b) { return wrap(frac_div(a.impl(), b.impl())); }

Expr Expr::pow(const Rat& k) const { return wrap(frac_pow_rat(impl(), k)); }
Expr Expr::pow(const Expr& k) const { return wrap(frac_pow_sym(impl(), k.impl())); }

bool Expr::is_zero() const { return frac_is_zero(impl()); }

bool Expr::is_one() const {
  Rat q;
  return frac_is_rat(impl(), &q) && q == 1;
}

std::optional<Rat> Expr::as_rational() const {
  Rat q;
  if (frac_is_rat(impl(), &q)) return q;
  return std::nullopt;
}

int Expr::compare(const Expr& a, const Expr& b) {
  return cmp_fraction(a.impl(), b.impl());
}

}  // namespace pgeo
