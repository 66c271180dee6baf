#pragma once

// Exact rational arithmetic used by the planners and cost accounting.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pruw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

BigInt floor_of(const Rational& v);
BigInt ceil_of(const Rational& v);
bool is_integer(const Rational& v);
Rational frac_part(const Rational& v);  // v - floor(v)
Rational positive_part(const Rational& v);  // [v]^+

// Converts a small non-negative integer-valued rational; throws otherwise.
std::int64_t to_int64(const Rational& v);
std::int64_t to_int64(const BigInt& v);
double to_double(const Rational& v);

// Canonical "p/q" (or "p" when integral).
std::string to_fraction_string(const Rational& v);
std::string to_decimal_string(const Rational& v, int places = 4);

// Accepts "p/q", integers and plain decimals such as "0.37" or ".5".
// Decimals are read exactly: "0.37" -> 37/100. Exponent notation is rejected.
Rational parse_rational(std::string_view text);

// Truncates toward zero to the given number of decimal digits.
Rational truncate_decimal(const Rational& v, int digits);

Rational sum(const std::vector<Rational>& values);

BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace pruw
