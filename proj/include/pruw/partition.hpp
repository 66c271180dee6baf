#pragma once

// Fractional assignment of one coded segment to R-element database subsets.

#include <cstddef>
#include <vector>

#include "pruw/rational.hpp"

namespace pruw {

struct PartitionEntry {
  Rational eta;                     // share of the segment, entries sum to 1
  std::vector<std::size_t> subset;  // R database indices, 0-based ascending

  friend bool operator==(const PartitionEntry&, const PartitionEntry&) = default;
};

struct PartitionSolution {
  Rational fraction;  // phi = (sum alloc) * K / R
  std::vector<PartitionEntry> entries;
};

// alloc(n) is database n's share of M*L for this segment. Finds eta_i with
// sum eta_i = 1 and (phi/K) sum eta_i b_i = alloc. Throws
// InfeasibleAllocation unless alloc(n) <= (sum alloc)/R for every n.
PartitionSolution solve_partition(const std::vector<Rational>& alloc, std::size_t K, std::size_t R);

// (phi/K) * sum_i eta_i b_i.
std::vector<Rational> reconstruct_allocation(const PartitionSolution& solution, std::size_t N,
                                             std::size_t K);

}  // namespace pruw
