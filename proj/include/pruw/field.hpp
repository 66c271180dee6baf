#pragma once

// Prime-field arithmetic and the public evaluation constants shared by every
// party of the protocol.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace pruw {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kSimulationPrime = 2147483647ULL;  // 2^31 - 1
inline constexpr std::uint64_t kAuditPrime = 251ULL;

bool is_prime(std::uint64_t n);

// An element of Z_q in canonical form (least non-negative residue). The
// modulus travels with the value so mixed-field arithmetic is caught.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(std::uint64_t value, std::uint64_t modulus);

  std::uint64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement inverse() const;
  FieldElement pow(std::uint64_t exponent) const;

  FieldElement& operator+=(const FieldElement& rhs);
  FieldElement& operator-=(const FieldElement& rhs);
  FieldElement& operator*=(const FieldElement& rhs);
  FieldElement& operator/=(const FieldElement& rhs);

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }
  FieldElement operator-() const;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
  friend auto operator<=>(const FieldElement&, const FieldElement&) = default;

 private:
  void check_same_field(const FieldElement& rhs) const;

  std::uint64_t value_ = 0;
  std::uint64_t modulus_ = 0;
};

std::ostream& operator<<(std::ostream& os, const FieldElement& e);

using FieldVector = std::vector<FieldElement>;

class PrimeField {
 public:
  // Throws CompositeModulus unless q is prime; q must also be below 2^63.
  explicit PrimeField(std::uint64_t q);

  std::uint64_t modulus() const noexcept { return q_; }

  FieldElement element(std::uint64_t v) const { return FieldElement(v % q_, q_); }
  FieldElement element_signed(std::int64_t v) const;
  FieldElement zero() const { return FieldElement(0, q_); }
  FieldElement one() const { return FieldElement(1, q_); }

  FieldElement random(Rng& rng) const;
  FieldVector random_vector(std::size_t n, Rng& rng) const;
  FieldVector zeros(std::size_t n) const { return FieldVector(n, zero()); }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t q_;
};

PrimeField make_field(std::uint64_t q);

// alpha_n for every database and the y x K grid f_{j,i} of one code.
// Indices are 0-based: alpha(n) for database n+1, f(j, i) for f_{j+1,i+1}.
class EvalConstants {
 public:
  EvalConstants(FieldVector alphas, FieldVector f, std::size_t y, std::size_t K);

  std::size_t num_databases() const noexcept { return alphas_.size(); }
  std::size_t y() const noexcept { return y_; }
  std::size_t K() const noexcept { return K_; }

  const FieldElement& alpha(std::size_t n) const { return alphas_.at(n); }
  const FieldElement& f(std::size_t j, std::size_t i) const { return f_.at(j * K_ + i); }
  const FieldVector& alphas() const noexcept { return alphas_; }
  const FieldVector& f_values() const noexcept { return f_; }

  friend bool operator==(const EvalConstants&, const EvalConstants&) = default;

 private:
  FieldVector alphas_;
  FieldVector f_;
  std::size_t y_;
  std::size_t K_;
};

// Draws N + y*K distinct nonzero constants from a seeded generator, sorts
// them ascending, and hands the first N to the databases. Throws
// FieldTooSmall when q <= N + y*K.
EvalConstants gen_eval_constants(const PrimeField& field, std::size_t N, std::size_t y,
                                 std::size_t K, std::uint64_t seed);

}  // namespace pruw
