#include "pruw/rational.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <cctype>
#include <sstream>

#include "pruw/error.hpp"

namespace pruw {

BigInt floor_of(const Rational& v) {
  const BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);  // always > 0
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil_of(const Rational& v) {
  BigInt f = floor_of(v);
  if (Rational(f) != v) f += 1;
  return f;
}

bool is_integer(const Rational& v) { return boost::multiprecision::denominator(v) == 1; }

Rational frac_part(const Rational& v) { return v - Rational(floor_of(v)); }

Rational positive_part(const Rational& v) { return v > 0 ? v : Rational(0); }

std::int64_t to_int64(const BigInt& v) {
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) {
    throw Error(ErrorCode::kInvalidInput, "integer out of 64-bit range");
  }
  return v.convert_to<std::int64_t>();
}

std::int64_t to_int64(const Rational& v) {
  if (!is_integer(v)) {
    throw Error(ErrorCode::kInvalidInput, "expected an integer, got " + to_fraction_string(v));
  }
  return to_int64(BigInt(boost::multiprecision::numerator(v)));
}

double to_double(const Rational& v) { return v.convert_to<double>(); }

std::string to_fraction_string(const Rational& v) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(v);
  if (boost::multiprecision::denominator(v) != 1) {
    os << '/' << boost::multiprecision::denominator(v);
  }
  return os.str();
}

std::string to_decimal_string(const Rational& v, int places) {
  // Round half away from zero at the requested precision, exactly.
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = v < 0;
  const Rational magnitude = negative ? Rational(-v) : v;
  BigInt scaled = floor_of(magnitude * Rational(scale) + Rational(1, 2));
  const BigInt whole = scaled / scale;
  const BigInt rem = scaled % scale;
  std::ostringstream os;
  if (negative && scaled != 0) os << '-';
  os << whole;
  if (places > 0) {
    std::string digits = rem.str();
    os << '.' << std::string(places - digits.size(), '0') << digits;
  }
  return os.str();
}

namespace {

BigInt parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw Error(ErrorCode::kInvalidInput, "malformed number '" + std::string(whole) + "'");
  }
  BigInt value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kInvalidInput, "malformed number '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  bool negative = false;
  if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
    negative = t.front() == '-';
    t.remove_prefix(1);
  }
  Rational result;
  if (const auto slash = t.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_digits(t.substr(0, slash), text);
    const BigInt den = parse_digits(t.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::kInvalidInput, "zero denominator in '" + std::string(text) + "'");
    result = Rational(num, den);
  } else if (const auto dot = t.find('.'); dot != std::string_view::npos) {
    const std::string_view int_part = t.substr(0, dot);
    const std::string_view frac = t.substr(dot + 1);
    if (int_part.empty() && frac.empty()) {
      throw Error(ErrorCode::kInvalidInput, "malformed number '" + std::string(text) + "'");
    }
    const BigInt whole = int_part.empty() ? BigInt(0) : parse_digits(int_part, text);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const BigInt fraction = frac.empty() ? BigInt(0) : parse_digits(frac, text);
    result = Rational(whole * scale + fraction, scale);
  } else {
    result = Rational(parse_digits(t, text));
  }
  return negative ? Rational(-result) : result;
}

Rational truncate_decimal(const Rational& v, int digits) {
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const Rational scaled = v * Rational(scale);
  const BigInt truncated = v >= 0 ? floor_of(scaled) : BigInt(-floor_of(Rational(-scaled)));
  return Rational(truncated, scale);
}

Rational sum(const std::vector<Rational>& values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

}  // namespace pruw
