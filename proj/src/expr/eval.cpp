// Evaluation: exact rational where possible, 120-digit reals otherwise.
// Also the compiled double-precision tape used by the numeric integrators
// and searches, and the random-evaluation equality fallback.

#include <cmath>
#include <random>

#include "expr_detail.hpp"

namespace pgeo {

using namespace detail;

namespace {

struct Value {
  bool exact = true;
  Rat q;
  Real r;

  static Value of(Rat v) {
    Value out;
    out.exact = true;
    out.q = std::move(v);
    return out;
  }
  static Value of_real(Real v) {
    Value out;
    out.exact = false;
    out.r = std::move(v);
    return out;
  }
  Real real() const { return exact ? static_cast<Real>(q) : r; }
};

Value val_mul(const Value& a, const Value& b) {
  if (a.exact && b.exact) return Value::of(a.q * b.q);
  return Value::of_real(a.real() * b.real());
}

Value val_add(const Value& a, const Value& b) {
  if (a.exact && b.exact) return Value::of(a.q + b.q);
  return Value::of_real(a.real() + b.real());
}

Value eval_fraction(const Fraction& f, const Assignment& asg);

std::string base_str(const Base& b) {
  Fraction f;
  Term t;
  t.factors.push_back(Factor{b, Exponent{Rat(1), nullptr}});
  f.num.terms.push_back(t);
  return fraction_to_string(f);
}

Value eval_base(const Base& b, const Assignment& asg) {
  switch (b.kind) {
    case BaseKind::Sym: {
      auto it = asg.exact.find(b.name);
      if (it != asg.exact.end()) return Value::of(it->second);
      auto jt = asg.approx.find(b.name);
      if (jt != asg.approx.end()) return Value::of_real(jt->second);
      throw Error("unbound symbol '" + b.name + "' in evaluation");
    }
    case BaseKind::Rad:
      return Value::of(Rat(b.rad));
    case BaseKind::Fun: {
      Value a = eval_fraction(*b.arg, asg);
      Real x = a.real();
      switch (b.fn) {
        case Fn::exp_: return Value::of_real(exp(x));
        case Fn::log_:
          if (x <= 0) throw DomainError("log of non-positive value in " + base_str(b));
          return Value::of_real(log(x));
        case Fn::sin_: return Value::of_real(sin(x));
        case Fn::cos_: return Value::of_real(cos(x));
        case Fn::sinh_: return Value::of_real(sinh(x));
        case Fn::cosh_: return Value::of_real(cosh(x));
        default: throw Error("unexpected function in canonical form");
      }
    }
    case BaseKind::Poly: {
      Fraction tmp;
      tmp.num = *b.poly;
      return eval_fraction(tmp, asg);
    }
  }
  throw Error("unreachable");
}

Value eval_pow(const Value& base, const Value& expo, const char* what) {
  if (expo.exact && is_integer(expo.q)) {
    long e = static_cast<long>(num(expo.q));
    if (base.exact) {
      if (base.q == 0 && e < 0) throw DomainError(std::string("division by zero in ") + what);
      return Value::of(rat_pow(base.q, e));
    }
    Real x = base.real();
    if (x == 0 && e < 0) throw DomainError(std::string("division by zero in ") + what);
    return Value::of_real(pow(x, static_cast<int>(e)));
  }
  Real e = expo.real();
  if (base.exact) {
    if (base.q == 0) {
      if (e > 0) return Value::of(Rat(0));
      throw DomainError(std::string("zero base with non-positive exponent in ") + what);
    }
    if (expo.exact && base.q > 0 && den(expo.q) == 2) {
      auto rn = exact_isqrt(num(base.q));
      auto rd = exact_isqrt(den(base.q));
      if (rn && rd) {
        Rat root(*rn, *rd);
        return Value::of(rat_pow(root, static_cast<long>(num(expo.q))));
      }
    }
    if (base.q < 0)
      throw DomainError(std::string("fractional power of negative value in ") + what);
  }
  Real x = base.real();
  if (x < 0) throw DomainError(std::string("fractional power of negative value in ") + what);
  if (x == 0) {
    if (e > 0) return Value::of_real(Real(0));
    throw DomainError(std::string("zero base with non-positive exponent in ") + what);
  }
  return Value::of_real(exp(e * log(x)));
}

Value eval_term(const Term& t, const Assignment& asg) {
  Value acc = Value::of(t.coeff);
  for (const auto& f : t.factors) {
    Value b = eval_base(f.base, asg);
    Value e = Value::of(f.exp.ratpart);
    if (f.exp.sympart) e = val_add(e, eval_fraction(*f.exp.sympart, asg));
    acc = val_mul(acc, eval_pow(b, e, "term factor"));
  }
  return acc;
}

Value eval_fraction(const Fraction& f, const Assignment& asg) {
  Value acc = Value::of(Rat(0));
  for (const auto& t : f.num.terms) acc = val_add(acc, eval_term(t, asg));
  for (const auto& d : f.den) {
    Value b = eval_base(d.base, asg);
    Value p = eval_pow(b, Value::of(Rat(d.e)), "denominator");
    if (acc.exact && p.exact) {
      if (p.q == 0)
        throw DomainError("denominator '" + base_str(d.base) + "' evaluates to zero");
      acc = Value::of(acc.q / p.q);
    } else {
      Real pr = p.real();
      if (pr == 0)
        throw DomainError("denominator '" + base_str(d.base) + "' evaluates to zero");
      acc = Value::of_real(acc.real() / pr);
    }
  }
  return acc;
}

}  // namespace

EvalResult evaluate(const Expr& e, const Assignment& a) {
  Value v = eval_fraction(e.impl(), a);
  EvalResult out;
  out.exact = v.exact;
  if (v.exact) {
    out.rational = v.q;
    out.real = static_cast<Real>(v.q);
  } else {
    out.real = v.r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// check_equal

namespace {

Rat random_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pnum(1, 24);
  std::uniform_int_distribution<int> pden(1, 9);
  return Rat(pnum(rng), pden(rng));
}

}  // namespace

Equality check_equal(const Expr& a, const Expr& b, int samples, unsigned seed) {
  bool canonical_ok = true;
  try {
    Expr diff = a - b;
    if (diff.is_zero()) return Equality::proved_equal;
  } catch (const BudgetExceeded&) {
    canonical_ok = false;
  }
  (void)canonical_ok;

  std::mt19937_64 rng(seed);
  auto syms = a.free_symbols();
  auto syms_b = b.free_symbols();
  syms.insert(syms_b.begin(), syms_b.end());

  int good = 0;
  const Real tol_zero = Real("1e-40");
  const Real tol_nonzero = Real("1e-12");
  for (int i = 0; i < samples * 4 && good < samples; ++i) {
    Assignment asg;
    // Sampling positive rationals keeps sqrt/log/fractional-power domains
    // valid whatever the positivity flags say.
    for (const auto& s : syms) asg.set(s, random_rat(rng));
    try {
      Real va = evaluate(a, asg).real;
      Real vb = evaluate(b, asg).real;
      Real scale = (std::max)(Real(1), (std::max)(abs(va), abs(vb)));
      Real d = abs(va - vb);
      if (d > tol_nonzero * scale) return Equality::not_equal;
      if (d < tol_zero * scale) ++good;
    } catch (const DomainError&) {
      continue;
    } catch (const Error&) {
      return Equality::undecided;
    }
  }
  if (good >= samples) return Equality::probably_equal;
  return Equality::undecided;
}

bool semantically_equal(const Expr& a, const Expr& b) {
  Equality e = check_equal(a, b);
  return e == Equality::proved_equal || e == Equality::probably_equal;
}

// ---------------------------------------------------------------------------
// CompiledExpr

struct CompiledExpr::Op {
  enum Kind { Const, Var, Add, Mul, Div, PowC, PowV, Func } kind = Const;
  double c = 0;
  int var = 0;
  int n = 0;
  Fn fn = Fn::exp_;
};

CompiledExpr::CompiledExpr() = default;
CompiledExpr::CompiledExpr(const CompiledExpr&) = default;
CompiledExpr::CompiledExpr(CompiledExpr&&) noexcept = default;
CompiledExpr& CompiledExpr::operator=(const CompiledExpr&) = default;
CompiledExpr& CompiledExpr::operator=(CompiledExpr&&) noexcept = default;
CompiledExpr::~CompiledExpr() = default;

struct CompiledExprBuilder {
  using Op = CompiledExpr::Op;
  std::vector<Op> ops;
  const std::vector<std::string>& vars;
  const Assignment& params;

  int var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == name) return static_cast<int>(i);
    return -1;
  }

  void emit_base(const Base& b) {
    switch (b.kind) {
      case BaseKind::Sym: {
        int idx = var_index(b.name);
        if (idx >= 0) {
          Op op; op.kind = Op::Var; op.var = idx;
          ops.push_back(op);
          return;
        }
        auto it = params.exact.find(b.name);
        if (it != params.exact.end()) {
          Op op; op.kind = Op::Const; op.c = static_cast<double>(static_cast<Real>(it->second));
          ops.push_back(op);
          return;
        }
        auto jt = params.approx.find(b.name);
        if (jt != params.approx.end()) {
          Op op; op.kind = Op::Const; op.c = static_cast<double>(jt->second);
          ops.push_back(op);
          return;
        }
        throw Error("compile: unbound symbol '" + b.name + "'");
      }
      case BaseKind::Rad: {
        Op op; op.kind = Op::Const; op.c = static_cast<double>(b.rad);
        ops.push_back(op);
        return;
      }
      case BaseKind::Fun: {
        emit_fraction(*b.arg);
        Op op; op.kind = Op::Func; op.fn = b.fn;
        ops.push_back(op);
        return;
      }
      case BaseKind::Poly: {
        Fraction tmp;
        tmp.num = *b.poly;
        emit_fraction(tmp);
        return;
      }
    }
  }

  void emit_term(const Term& t) {
    int n = 1;
    {
      Op op; op.kind = Op::Const; op.c = static_cast<double>(static_cast<Real>(t.coeff));
      ops.push_back(op);
    }
    for (const auto& f : t.factors) {
      emit_base(f.base);
      if (f.exp.rational()) {
        Op op; op.kind = Op::PowC; op.c = static_cast<double>(static_cast<Real>(f.exp.ratpart));
        ops.push_back(op);
      } else {
        Fraction e = *f.exp.sympart;
        if (f.exp.ratpart != 0) e = *frac_add(e, *frac_rat(f.exp.ratpart));
        emit_fraction(e);
        Op op; op.kind = Op::PowV;
        ops.push_back(op);
      }
      ++n;
    }
    if (n > 1) {
      Op op; op.kind = Op::Mul; op.n = n;
      ops.push_back(op);
    }
  }

  void emit_fraction(const Fraction& f) {
    if (f.num.zero()) {
      Op op; op.kind = Op::Const; op.c = 0;
      ops.push_back(op);
    } else {
      int n = 0;
      for (const auto& t : f.num.terms) {
        emit_term(t);
        ++n;
      }
      if (n > 1) {
        Op op; op.kind = Op::Add; op.n = n;
        ops.push_back(op);
      }
    }
    for (const auto& d : f.den) {
      emit_base(d.base);
      if (d.e != 1) {
        Op op; op.kind = Op::PowC; op.c = static_cast<double>(d.e);
        ops.push_back(op);
      }
      Op op; op.kind = Op::Div;
      ops.push_back(op);
    }
  }
};

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& vars,
                           const Assignment& params) {
  CompiledExprBuilder b{{}, vars, params};
  b.emit_fraction(e.impl());
  ops_ = std::make_shared<const std::vector<Op>>(std::move(b.ops));
}

double CompiledExpr::eval(const double* xs) const {
  if (!ops_) return 0.0;
  std::vector<double> st;
  st.reserve(64);
  for (const auto& op : *ops_) {
    switch (op.kind) {
      case Op::Const: st.push_back(op.c); break;
      case Op::Var: st.push_back(xs[op.var]); break;
      case Op::Add: {
        double acc = 0;
        for (int i = 0; i < op.n; ++i) { acc += st.back(); st.pop_back(); }
        st.push_back(acc);
        break;
      }
      case Op::Mul: {
        double acc = 1;
        for (int i = 0; i < op.n; ++i) { acc *= st.back(); st.pop_back(); }
        st.push_back(acc);
        break;
      }
      case Op::Div: {
        double d = st.back(); st.pop_back();
        st.back() /= d;
        break;
      }
      case Op::PowC: st.back() = std::pow(st.back(), op.c); break;
      case Op::PowV: {
        double e = st.back(); st.pop_back();
        st.back() = std::pow(st.back(), e);
        break;
      }
      case Op::Func: {
        double x = st.back();
        switch (op.fn) {
          case Fn::exp_: st.back() = std::exp(x); break;
          case Fn::log_: st.back() = std::log(x); break;
          case Fn::sin_: st.back() = std::sin(x); break;
          case Fn::cos_: st.back() = std::cos(x); break;
          case Fn::sinh_: st.back() = std::sinh(x); break;
          case Fn::cosh_: st.back() = std::cosh(x); break;
          default: st.back() = std::nan(""); break;
        }
        break;
      }
    }
  }
  return st.empty() ? 0.0 : st.back();
}

}  // namespace pgeo
