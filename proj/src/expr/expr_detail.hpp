#ifndef PGEO_EXPR_DETAIL_HPP
#define PGEO_EXPR_DETAIL_HPP

#include <memory>
#include <string>
#include <vector>

#include "pgeo/expr.hpp"

// Canonical representation.
//
// Fraction = num / prod(den_i^e_i) where num is a collected polynomial over
// "atoms" and den is a sorted factored product with positive integer
// exponents. Atom kinds: symbols, squarefree-integer radicals (always to the
// power 1/2), function applications, and polynomial bases (sums raised to
// non-integer or symbolic powers, or appearing in the denominator).
//
// Numerator factor exponents: rational part + optional symbolic part. When
// there is no symbolic part the rational part is > 0 (negative rational
// powers live in the denominator, with the fractional remainder kept in the
// numerator). When a symbolic part is present the whole power stays in the
// numerator whatever the rational part's sign.
//
// Rewrites folded into construction: like-base exponent collection,
// integer-radical merging, exp(a)^k -> exp(k*a) and exp(a)*exp(b) ->
// exp(a+b), tanh -> sinh/cosh, even powers of cosh and sin eliminated via
// cosh^2 = 1 + sinh^2 and sin^2 = 1 - cos^2 (numerator and denominator),
// integer powers of sums expanded, odd/even argument-sign normalization for
// trig/hyperbolic atoms, and factor-wise num/den cancellation.

namespace pgeo::detail {

struct Fraction;
struct Poly;
using FracPtr = std::shared_ptr<const Fraction>;
using PolyPtr = std::shared_ptr<const Poly>;

enum class BaseKind { Sym = 0, Rad = 1, Fun = 2, Poly = 3 };

struct Base {
  BaseKind kind{BaseKind::Sym};
  std::string name;       // Sym
  bool positive = false;  // Sym
  Int rad;                // Rad: squarefree integer >= 2
  Fn fn{Fn::exp_};        // Fun
  FracPtr arg;            // Fun
  PolyPtr poly;           // Poly
};

struct Exponent {
  Rat ratpart{0};
  FracPtr sympart;  // nullable; no pure-rational constant inside
  bool rational() const { return sympart == nullptr; }
};

struct Factor {
  Base base;
  Exponent exp;
};

struct Term {
  Rat coeff{1};
  std::vector<Factor> factors;  // sorted by base order, distinct bases
};

struct Poly {
  std::vector<Term> terms;  // sorted by monomial order, collected
  bool zero() const { return terms.empty(); }
};

struct DenFactor {
  Base base;
  long e{1};  // >= 1
};

struct Fraction {
  Poly num;
  std::vector<DenFactor> den;  // sorted by base order
};

// ---------------------------------------------------------------------------
// Orderings (total, deterministic).

int cmp_rat(const Rat& a, const Rat& b);
int cmp_base(const Base& a, const Base& b);
int cmp_exponent(const Exponent& a, const Exponent& b);
int cmp_factors(const std::vector<Factor>& a, const std::vector<Factor>& b);
int cmp_term_monomial(const Term& a, const Term& b);
int cmp_poly(const Poly& a, const Poly& b);
int cmp_fraction(const Fraction& a, const Fraction& b);

// ---------------------------------------------------------------------------
// Constructors / arithmetic on the canonical core.

FracPtr frac_zero();
FracPtr frac_rat(const Rat& q);
FracPtr frac_symbol(const std::string& name, bool positive);
FracPtr frac_from_poly(Poly p);

bool frac_is_zero(const Fraction& f);
bool frac_is_rat(const Fraction& f, Rat* out = nullptr);

FracPtr frac_add(const Fraction& a, const Fraction& b);
FracPtr frac_neg(const Fraction& a);
FracPtr frac_mul(const Fraction& a, const Fraction& b);
FracPtr frac_div(const Fraction& a, const Fraction& b);
FracPtr frac_pow_rat(const Fraction& a, const Rat& k);
FracPtr frac_pow_sym(const Fraction& a, const Fraction& k);
FracPtr frac_apply(Fn f, const Fraction& arg);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Rat& s);
Poly poly_pow_int(const Poly& a, unsigned long k);
// Exact division attempt; nullopt if it does not divide (or gives up).
std::optional<Poly> poly_divide_exact(const Poly& p, const Poly& d);

// Term * term can expand (Pythagorean rewrites), hence returns a Poly.
Poly term_mul(const Term& a, const Term& b);
// Normalizes a raw factor list + coefficient into canonical term(s).
Poly normalize_term(Rat coeff, std::vector<Factor> factors);

// True if every term is manifestly >= 0 (positive coeff, positive bases or
// even integer exponents).
bool poly_provably_nonneg(const Poly& p);
bool base_provably_positive(const Base& b);

void budget_check(std::size_t n);

std::string fraction_to_string(const Fraction& f);

// Structural recursion helpers shared by derivative/substitute/eval/print.
struct ExprParts {
  // Decomposes a fraction into Expr-level pieces for generic recursion.
};

inline Expr wrap(FracPtr f) { return Expr(std::move(f)); }

}  // namespace pgeo::detail

#endif
