#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "bext/errors.hpp"

namespace bext {

/// Arbitrary-precision rational. Always kept in lowest terms by GMP.
using Q = boost::multiprecision::mpq_rational;
using Z = boost::multiprecision::mpz_int;

/// 2^e for any signed exponent.
inline Q pow2(int e) {
  Z one = 1;
  if (e >= 0) return Q(Z(one << e));
  return Q(one, Z(one << (-e)));
}

inline double to_double(const Q& q) { return q.convert_to<double>(); }

/// Largest multiple of 2^-bits that is <= x.
inline Q dyadic_floor(double x, int bits = 40) {
  if (!std::isfinite(x)) throw ValidationError("dyadic_floor: non-finite value");
  double scaled = std::floor(std::ldexp(x, bits));
  return Q(scaled) * pow2(-bits);
}

/// Smallest multiple of 2^-bits that is >= x.
inline Q dyadic_ceil(double x, int bits = 40) {
  if (!std::isfinite(x)) throw ValidationError("dyadic_ceil: non-finite value");
  double scaled = std::ceil(std::ldexp(x, bits));
  return Q(scaled) * pow2(-bits);
}

/// Nearest multiple of 2^-bits.
inline Q dyadic_round(double x, int bits = 40) {
  if (!std::isfinite(x)) throw ValidationError("dyadic_round: non-finite value");
  double scaled = std::nearbyint(std::ldexp(x, bits));
  return Q(scaled) * pow2(-bits);
}

inline int sign(const Q& q) { return q.sign(); }

inline Q abs_q(const Q& q) { return q.sign() < 0 ? Q(-q) : q; }

/// Sign of a + b*sqrt(2), decided exactly.
inline int sign_a_plus_b_sqrt2(const Q& a, const Q& b) {
  int sa = a.sign();
  int sb = b.sign();
  if (sa >= 0 && sb >= 0) return (sa > 0 || sb > 0) ? 1 : 0;
  if (sa <= 0 && sb <= 0) return -1;
  // Opposite signs: compare a^2 with 2 b^2.
  Q lhs = a * a;
  Q rhs = 2 * b * b;
  if (lhs == rhs) return 0;
  if (lhs > rhs) return sa;
  return sb;
}

/// Exact test of (1 + sqrt 2)^2 * d_sq < r_sq, i.e. (1 + sqrt 2) d < r for
/// nonnegative d, r given through their squares.
inline bool one_plus_sqrt2_times_less(const Q& d_sq, const Q& r_sq) {
  // r_sq - (3 + 2 sqrt 2) d_sq > 0
  return sign_a_plus_b_sqrt2(r_sq - 3 * d_sq, -2 * d_sq) > 0;
}

inline std::string to_string(const Q& q) { return q.str(); }

/// Parse "p/q" or "p".
inline Q parse_rational(const std::string& text) {
  try {
    return Q(text);
  } catch (const std::exception&) {
    throw ValidationError("malformed rational: '" + text + "'");
  }
}

}  // namespace bext
