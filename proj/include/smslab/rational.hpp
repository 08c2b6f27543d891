#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace smslab {

using Rational = mpq_class;

// Accepts "a/b", integers and plain decimals ("0.125", "-3.5"); decimals are
// converted exactly. Throws std::invalid_argument on malformed input.
[[nodiscard]] Rational parse_rational(std::string_view text);

// Canonical text form: "a/b" in lowest terms, or "a" when the denominator is 1.
[[nodiscard]] std::string to_string(const Rational& r);

[[nodiscard]] inline double to_double(const Rational& r) { return r.get_d(); }

[[nodiscard]] inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace smslab
