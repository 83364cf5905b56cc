#include "pgeo/rational.hpp"

#include <sstream>

namespace pgeo {

std::optional<Int> exact_isqrt(const Int& n) {
  if (n < 0) return std::nullopt;
  if (n < 2) return n;
  Int r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  if ((r + 1) * (r + 1) == n) return r + 1;
  return std::nullopt;
}

SquarefreeSplit squarefree_split(Int n) {
  SquarefreeSplit out{Int(1), Int(1)};
  if (n <= 0) throw std::runtime_error("squarefree_split of non-positive integer");
  // trial division; radicands in this project are small
  Int p = 2;
  const Int bailout = 1000000;
  while (p * p <= n) {
    if (p > bailout) break;
    unsigned long mult = 0;
    while (n % p == 0) {
      n /= p;
      ++mult;
    }
    if (mult) {
      for (unsigned long i = 0; i + 1 < mult; i += 2) out.square_root *= p;
      if (mult % 2) out.radicand *= p;
    }
    p += (p == 2) ? 1 : 2;
  }
  out.radicand *= n;  // leftover prime (or 1, or an unfactored chunk)
  if (auto r = exact_isqrt(out.radicand); r && out.radicand > 1) {
    out.square_root *= *r;
    out.radicand = 1;
  }
  return out;
}

std::string rat_to_string(const Rat& q) {
  std::ostringstream os;
  os << num(q);
  if (den(q) != 1) os << "/" << den(q);
  return os.str();
}

}  // namespace pgeo
