#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace eapr {

using Rational = mpq_class;

// Parses "m/n" or "m"; throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view s);

// Canonical "m/n" form; integers print as "m" unless force_slash is set.
std::string to_string(const Rational& q, bool force_slash = false);

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline const Rational& min_q(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_q(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace eapr
