#pragma once

// Exact privacy and security audits by exhaustive enumeration of the noise
// space over a small prime field. Distances are exact rationals.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pruw/protocol.hpp"
#include "pruw/rational.hpp"

namespace pruw {

struct AuditCase {
  std::string kind;  // query, update or storage
  std::string description;
  CodeSpec code;
  std::size_t db = 0;
  std::size_t lane = 0;
  std::uint64_t points = 0;  // noise realisations enumerated per distribution
  Rational tv;               // total-variation distance
};

struct AuditReport {
  std::uint64_t q = 0;
  std::size_t M = 0;
  bool negative_control = false;
  std::vector<AuditCase> cases;
  Rational max_tv;

  bool all_zero() const { return max_tv == 0; }
};

// Codes audited: (K=1, R=4) and (K=2, R=6); both have y = 1, so one lane of
// query noise spans q^M points. With negative_control set, every noise term
// is replaced by zero, which must expose theta, delta and W.
AuditReport audit_privacy(std::uint64_t q = kAuditPrime, std::size_t M = 2, bool negative_control = false,
                          std::uint64_t seed = 7);

// Exact TV distance between two count histograms with equal totals.
Rational tv_distance(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

}  // namespace pruw
