#include "pruw/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pruw/error.hpp"

namespace pruw {

PartitionSolution solve_partition(const std::vector<Rational>& alloc, std::size_t K, std::size_t R) {
  const std::size_t N = alloc.size();
  if (K == 0 || R == 0 || R > N) {
    throw Error(ErrorCode::kInvalidInput, "need 1 <= R <= N and K >= 1");
  }
  const Rational total = sum(alloc);
  for (std::size_t n = 0; n < N; ++n) {
    if (alloc[n] < 0) throw Error(ErrorCode::kInvalidInput, "negative allocation");
    if (alloc[n] * R > total) {
      throw Error(ErrorCode::kInfeasibleAllocation,
                  "database " + std::to_string(n + 1) + " holds " + to_decimal_string(alloc[n]) +
                      " > total/R = " + to_decimal_string(total / R));
    }
  }
  PartitionSolution out;
  out.fraction = total * K / R;
  if (total == 0) return out;

  // u sums to R with every u(n) <= 1; each step keeps max u <= sum u / R.
  std::vector<Rational> u(N);
  for (std::size_t n = 0; n < N; ++n) u[n] = alloc[n] * R / total;
  Rational mass = R;

  std::vector<std::size_t> order(N);
  while (mass > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    Rational step = u[order[R - 1]];
    if (R < N) step = std::min(step, Rational(mass / R - u[order[R]]));
    if (step <= 0) throw Error(ErrorCode::kInvariantViolation, "partition stalled");

    std::vector<std::size_t> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(R));
    std::sort(subset.begin(), subset.end());
    for (std::size_t n : subset) u[n] -= step;
    mass -= step * R;
    out.entries.push_back(PartitionEntry{step, std::move(subset)});
  }

  if (reconstruct_allocation(out, N, K) != alloc) {
    throw Error(ErrorCode::kInvariantViolation, "partition does not reproduce the allocation");
  }
  return out;
}

std::vector<Rational> reconstruct_allocation(const PartitionSolution& solution, std::size_t N,
                                             std::size_t K) {
  std::vector<Rational> out(N);
  for (const auto& e : solution.entries) {
    for (std::size_t n : e.subset) {
      if (n >= N) throw Error(ErrorCode::kBadIndex, "subset index out of range");
      out[n] += solution.fraction * e.eta / K;
    }
  }
  return out;
}

}  // namespace pruw
