#include "pruw/field.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <string>

#include "pruw/error.hpp"

namespace pruw {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

}  // namespace

// Deterministic Miller-Rabin; this base set is exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

FieldElement::FieldElement(std::uint64_t value, std::uint64_t modulus)
    : value_(modulus == 0 ? value : value % modulus), modulus_(modulus) {}

void FieldElement::check_same_field(const FieldElement& rhs) const {
  if (modulus_ != rhs.modulus_) {
    throw Error(ErrorCode::kDimensionMismatch, "field elements from different fields");
  }
}

FieldElement& FieldElement::operator+=(const FieldElement& rhs) {
  check_same_field(rhs);
  value_ += rhs.value_;
  if (value_ >= modulus_) value_ -= modulus_;
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& rhs) {
  check_same_field(rhs);
  value_ = value_ >= rhs.value_ ? value_ - rhs.value_ : value_ + modulus_ - rhs.value_;
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& rhs) {
  check_same_field(rhs);
  value_ = mul_mod(value_, rhs.value_, modulus_);
  return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& rhs) {
  check_same_field(rhs);
  return *this *= rhs.inverse();
}

FieldElement FieldElement::operator-() const {
  return FieldElement(value_ == 0 ? 0 : modulus_ - value_, modulus_);
}

FieldElement FieldElement::pow(std::uint64_t exponent) const {
  return FieldElement(pow_mod(value_, exponent, modulus_), modulus_);
}

FieldElement FieldElement::inverse() const {
  if (value_ == 0) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
  return pow(modulus_ - 2);
}

std::ostream& operator<<(std::ostream& os, const FieldElement& e) { return os << e.value(); }

PrimeField::PrimeField(std::uint64_t q) : q_(q) {
  if (q < 2 || !is_prime(q)) {
    throw Error(ErrorCode::kCompositeModulus, std::to_string(q) + " is not prime");
  }
  if (q >= (1ULL << 63)) {
    throw Error(ErrorCode::kInvalidInput, "modulus must be below 2^63");
  }
}

FieldElement PrimeField::element_signed(std::int64_t v) const {
  const auto q = static_cast<std::int64_t>(q_);
  std::int64_t r = v % q;
  if (r < 0) r += q;
  return FieldElement(static_cast<std::uint64_t>(r), q_);
}

FieldElement PrimeField::random(Rng& rng) const {
  std::uniform_int_distribution<std::uint64_t> dist(0, q_ - 1);
  return FieldElement(dist(rng), q_);
}

FieldVector PrimeField::random_vector(std::size_t n, Rng& rng) const {
  FieldVector out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random(rng));
  return out;
}

PrimeField make_field(std::uint64_t q) { return PrimeField(q); }

EvalConstants::EvalConstants(FieldVector alphas, FieldVector f, std::size_t y, std::size_t K)
    : alphas_(std::move(alphas)), f_(std::move(f)), y_(y), K_(K) {
  if (f_.size() != y_ * K_) {
    throw Error(ErrorCode::kDimensionMismatch, "f grid must hold y*K constants");
  }
  std::set<std::uint64_t> seen;
  for (const auto& a : alphas_) seen.insert(a.value());
  for (const auto& v : f_) seen.insert(v.value());
  if (seen.size() != alphas_.size() + f_.size()) {
    throw Error(ErrorCode::kInvalidInput, "evaluation constants must be pairwise distinct");
  }
}

EvalConstants gen_eval_constants(const PrimeField& field, std::size_t N, std::size_t y,
                                 std::size_t K, std::uint64_t seed) {
  const std::size_t needed = N + y * K;
  if (field.modulus() <= needed) {
    throw Error(ErrorCode::kFieldTooSmall,
                "q=" + std::to_string(field.modulus()) + " must exceed N + y*K = " +
                    std::to_string(needed));
  }
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(1, field.modulus() - 1);
  std::set<std::uint64_t> drawn;
  while (drawn.size() < needed) drawn.insert(dist(rng));
  // std::set iterates ascending.
  std::vector<std::uint64_t> sorted(drawn.begin(), drawn.end());
  FieldVector alphas;
  FieldVector f;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (i < N ? alphas : f).push_back(field.element(sorted[i]));
  }
  return EvalConstants(std::move(alphas), std::move(f), y, K);
}

}  // namespace pruw
