#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace qthresh {

/// Exact rational; mpq_class keeps numerator/denominator canonical as long as
/// every value is built through the helpers below.
using Rational = mpq_class;

/// Parses "a/b", "a", or a plain decimal such as "0.25" or "1e-3".
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Always "num/den" (den = 1 included), the certificate/file form.
std::string to_fraction(const Rational& q);

/// "num" when integral, otherwise "num/den".
std::string to_short(const Rational& q);

/// 12 significant digits, %.12g style.
std::string to_decimal(const Rational& q);

Rational pow(const Rational& base, unsigned exponent);

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace qthresh
