#pragma once

// Storage plans for heterogeneous constraints mu(1..N): choose between the
// single-k mixture C1 and the four-code mixture C2, split every database's
// space across the codes, and partition each code over database subsets.
//
// Throughout, ceil(v) is taken as floor(v) + 1 so the paired codes
// (a, floor v) and (a, floor v + 1) stay distinct when v is an integer; the
// fractions then put all weight on the first of the pair.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pruw/plan.hpp"
#include "pruw/rational.hpp"

namespace pruw {

struct DerivedParams {
  Rational k;  // 1 / max mu
  Rational p;  // sum mu
  Rational r;  // k p
  Rational s;  // floor(k) p
};

// paper_rounded truncates k to one decimal before deriving r and s.
DerivedParams derive_params(const std::vector<Rational>& mu, bool paper_rounded = false);

// Throws InvalidInput for N < 4 or mu outside (0, 1], and
// DegenerateHomogeneous when every mu(n) is equal.
void check_constraints(const std::vector<Rational>& mu);

struct C1Result {
  Rational cost;
  Rational beta;  // ceil(s) - s, share of the (floor k, floor s) code
};

// Throws InfeasibleCode when a code with a nonzero share is not admissible.
C1Result compute_c1(const DerivedParams& params);

struct C2Result {
  Rational cost;
  Rational alpha;
  Rational beta;
  Rational delta;
};

// Throws InvalidInput for integer k and InfeasibleCode when a code with a
// nonzero share is not admissible.
C2Result compute_c2(const DerivedParams& params);

struct CodeShare {
  std::string label;
  std::size_t K = 0;
  std::size_t R = 0;
  Rational fraction;
  std::vector<Rational> allocation;
};

struct GammaValues {
  std::optional<Rational> tilde;
  std::optional<Rational> main;
  std::optional<Rational> hat;
  std::optional<Rational> bar;
};

struct AllocationTable {
  std::vector<CodeShare> shares;  // two codes for C1, four for C2
  GammaValues gammas;

  const CodeShare& share(const std::string& label) const;
};

AllocationTable allocate_lemma0(const std::vector<Rational>& mu, const DerivedParams& params);
AllocationTable allocate_lemma1(const std::vector<Rational>& mu, const DerivedParams& params,
                                const Rational& alpha, const Rational& beta, const Rational& delta);

// Sums, caps, non-negativity and per-database totals. Returns one message
// per violation; empty means the table is valid.
std::vector<std::string> allocation_violations(const AllocationTable& table,
                                               const std::vector<Rational>& mu);

// Lower bounds on alpha, beta, delta and the storage balance
// identity. Empty means satisfied.
std::vector<std::string> mixture_violations(const DerivedParams& params, const C2Result& c2);

struct HeteroOptions {
  bool paper_rounded = false;
  std::uint64_t seed = 1;
};

struct HeteroResult {
  StoragePlan plan;
  DerivedParams params;
  std::optional<C1Result> c1;
  std::optional<C2Result> c2;
  std::string c1_note;  // why C1 is unavailable, if it is
  std::string c2_note;
  AllocationTable table;
};

HeteroResult plan_hetero_detailed(const std::vector<Rational>& mu, const HeteroOptions& options = {});
StoragePlan plan_hetero(const std::vector<Rational>& mu, const HeteroOptions& options = {});

// Single (K, R) code over the whole model; needs R = K p and the partition
// condition mu(n) <= p / R.
StoragePlan plan_single_code(const std::vector<Rational>& mu, std::size_t K, std::size_t R,
                             std::uint64_t seed = 1);

}  // namespace pruw
