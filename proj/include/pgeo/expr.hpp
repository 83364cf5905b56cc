#ifndef PGEO_EXPR_HPP
#define PGEO_EXPR_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgeo/rational.hpp"

namespace pgeo {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

// Raised when evaluate() hits log of a non-positive value, division by zero, …
class DomainError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Thrown when canonicalization exceeds the configured node budget; callers
// that can degrade gracefully catch it and report "undecided".
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

enum class Fn { exp_, log_, sin_, cos_, sinh_, cosh_, tanh_, sqrt_ };

const char* fn_name(Fn f);

namespace detail {
struct Fraction;
}

/// Immutable symbolic scalar, always held in canonical form.
///
/// Canonical form: a fraction num/den where num is a collected sum of terms
/// (rational coefficient times a sorted product of atom powers) and den is a
/// sorted product of positive integer powers of atoms/polynomials. The rewrite
/// set applied on construction: like-base power collection (including symbolic
/// exponents), sqrt-radical merging over squarefree integer radicands,
/// exp(a)·exp(b) → exp(a+b), tanh → sinh/cosh, elimination of even powers of
/// cosh and sin via cosh² = 1+sinh², sin² = 1−cos², expansion of integer
/// powers of sums, and factor-wise numerator/denominator cancellation.
class Expr {
 public:
  Expr();  // zero
  static Expr num(Rat q);
  static Expr integer(long long n) { return num(Rat(n)); }
  static Expr symbol(const std::string& name, bool positive = false);
  static Expr apply(Fn f, const Expr& arg);
  static Expr sqrt(const Expr& arg) { return apply(Fn::sqrt_, arg); }

  Expr operator-() const;
  Expr& operator+=(const Expr& o) { *this = *this + o; return *this; }
  Expr& operator-=(const Expr& o) { *this = *this - o; return *this; }
  Expr& operator*=(const Expr& o) { *this = *this * o; return *this; }
  Expr& operator/=(const Expr& o) { *this = *this / o; return *this; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  Expr pow(const Rat& k) const;
  Expr pow(const Expr& k) const;

  bool is_zero() const;
  bool is_one() const;
  std::optional<Rat> as_rational() const;  // set iff the value is an exact rational
  bool is_rational_constant() const { return as_rational().has_value(); }

  std::set<std::string> free_symbols() const;
  bool depends_on(const std::string& sym) const;

  Expr derivative(const std::string& sym) const;
  Expr substitute(const std::map<std::string, Expr>& repl) const;

  std::string str() const;

  /// Structural (canonical) identity, not semantic equality.
  bool identical(const Expr& o) const { return compare(*this, o) == 0; }
  static int compare(const Expr& a, const Expr& b);

  const detail::Fraction& impl() const { return *impl_; }
  explicit Expr(std::shared_ptr<const detail::Fraction> f) : impl_(std::move(f)) {}

 private:
  std::shared_ptr<const detail::Fraction> impl_;
};

inline Expr operator+(const Expr& a, long long b) { return a + Expr::integer(b); }
inline Expr operator*(long long a, const Expr& b) { return Expr::integer(a) * b; }

/// Re-runs canonicalization (a no-op on already-canonical values; exposed so
/// the idempotence contract simplify(simplify(e)) = simplify(e) is testable).
Expr simplify(const Expr& e);

/// Node budget for expansions; exceeding it throws BudgetExceeded.
void set_simplify_budget(std::size_t max_terms);
std::size_t simplify_budget();

enum class Equality { proved_equal, probably_equal, not_equal, undecided };

/// simplify(a−b)==0 → proved_equal; otherwise falls back to evaluation at
/// `samples` random rational points (seeded, deterministic).
Equality check_equal(const Expr& a, const Expr& b, int samples = 16, unsigned seed = 0x5eed);
inline bool proved_equal(const Expr& a, const Expr& b) {
  return check_equal(a, b) == Equality::proved_equal;
}
/// proved or probably equal.
bool semantically_equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Parsing

struct ParseOptions {
  // Names assumed positive (chart coordinates with positive range, radii, …).
  std::set<std::string> positive;
  // When non-empty, identifiers outside this set are rejected.
  std::set<std::string> allowed;
};

Expr parse_expr(const std::string& text, const ParseOptions& opts = {});

// ---------------------------------------------------------------------------
// Evaluation

/// Map symbol → value. Rational entries keep evaluation exact where possible.
struct Assignment {
  std::map<std::string, Rat> exact;
  std::map<std::string, Real> approx;

  void set(const std::string& name, Rat v) { exact[name] = std::move(v); }
  void set_real(const std::string& name, Real v) { approx[name] = std::move(v); }
  bool has(const std::string& name) const {
    return exact.count(name) || approx.count(name);
  }
};

struct EvalResult {
  bool exact = false;
  Rat rational;  // valid iff exact
  Real real;     // always valid
};

/// Exact rational when the expression is rational over rational inputs,
/// otherwise a high-precision real. Throws DomainError / Error (unbound symbol).
EvalResult evaluate(const Expr& e, const Assignment& a);

inline double evaluate_double(const Expr& e, const Assignment& a) {
  return static_cast<double>(evaluate(e, a).real);
}

// ---------------------------------------------------------------------------
// Compiled form for fast repeated numeric evaluation (RK4 loops, searches).

class CompiledExpr {
 public:
  CompiledExpr();
  /// `vars` fixes the positional layout; all other free symbols must be bound
  /// in `params` at compile time.
  CompiledExpr(const Expr& e, const std::vector<std::string>& vars,
               const Assignment& params = {});
  CompiledExpr(const CompiledExpr&);
  CompiledExpr(CompiledExpr&&) noexcept;
  CompiledExpr& operator=(const CompiledExpr&);
  CompiledExpr& operator=(CompiledExpr&&) noexcept;
  ~CompiledExpr();

  double eval(const double* xs) const;
  double eval(const std::vector<double>& xs) const { return eval(xs.data()); }

  struct Op;

 private:
  std::shared_ptr<const std::vector<Op>> ops_;
  friend struct CompiledExprBuilder;
};

}  // namespace pgeo

#endif
