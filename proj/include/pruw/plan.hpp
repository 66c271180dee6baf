#pragma once

// Storage plans shared by both planners and the simulator, plus their JSON
// form. A plan splits every submodel into segments; each segment uses one
// (K, R) code and is spread over database subsets by its partition.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pruw/partition.hpp"
#include "pruw/protocol.hpp"
#include "pruw/rational.hpp"

namespace pruw {

enum class PlanKind { kHeterogeneous, kHomogeneous };

struct Segment {
  std::string label;
  CodeSpec code;
  Rational fraction;                 // share of every submodel's L parameters
  std::vector<Rational> allocation;  // per database, share of M*L
  std::vector<PartitionEntry> partition;
  std::uint64_t seed = 0;            // evaluation constants for this segment
};

struct StoragePlan {
  PlanKind kind = PlanKind::kHeterogeneous;
  std::size_t N = 0;
  std::vector<Rational> constraints;
  std::map<std::string, Rational> derived;  // k, p, r, s or mu, gamma
  std::string branch;                       // C1, C2 or hull
  std::map<std::string, Rational> mixture;  // alpha, beta, delta, c1, c2 ...
  std::vector<Segment> segments;
  Rational predicted_cost;
};

// C_T(a, b) for coding parameter a and replication b.
Rational cost_function(std::size_t a, std::size_t b);

// sum over segments of fraction * C_T(code).
Rational mixture_cost(const StoragePlan& plan);

// Throws InvariantViolation if fractions do not sum to 1, a partition does
// not reproduce its allocation, allocations do not add up to the
// constraints, or the predicted cost differs from the segment mixture.
void validate_plan(const StoragePlan& plan);

std::string plan_kind_name(PlanKind kind);

// Canonical JSON (sorted keys, two-space indent, trailing newline).
std::string plan_to_json(const StoragePlan& plan);
StoragePlan plan_from_json(const std::string& text);

}  // namespace pruw
