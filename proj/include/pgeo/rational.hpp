#ifndef PGEO_RATIONAL_HPP
#define PGEO_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <string>

namespace pgeo {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Working real type for evaluate(): 120 decimal digits, enough headroom for
// the 100-digit finite-difference checks and the default 50-digit output.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

inline Int num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rat& q) { return den(q) == 1; }

inline Rat rat_pow(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  Rat b = e > 0 ? base : Rat(1) / base;
  unsigned long n = e > 0 ? static_cast<unsigned long>(e) : static_cast<unsigned long>(-e);
  Rat out(1);
  while (n) {
    if (n & 1) out *= b;
    b *= b;
    n >>= 1;
  }
  return out;
}

// Exact integer square root if n is a perfect square.
std::optional<Int> exact_isqrt(const Int& n);

// n = s^2 * r with r squarefree (trial division; exact for the small radicands
// used here, bails out to r=n for huge inputs).
struct SquarefreeSplit {
  Int square_root;  // s
  Int radicand;     // r
};
SquarefreeSplit squarefree_split(Int n);

std::string rat_to_string(const Rat& q);

}  // namespace pgeo

#endif
