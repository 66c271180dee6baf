#pragma once

// Storage plans for a common constraint mu at all N databases: mix the two
// lower-hull vertices of the odd-gap (mu, cost) pairs that bracket mu, and
// lay each code out over cyclically allocated sections.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pruw/plan.hpp"
#include "pruw/rational.hpp"

namespace pruw {

struct BasicPair {
  std::size_t R = 0;
  std::size_t K = 0;
  Rational mu;    // R / (N K)
  Rational cost;  // C_T(K, R)

  friend bool operator==(const BasicPair&, const BasicPair&) = default;
};

// Admissible pairs with odd R - K, sorted by mu then cost.
std::vector<BasicPair> basic_pairs(std::size_t N);

// Lower convex hull in the (mu, cost) plane, mu ascending. Collinear points
// are kept; among pairs with equal mu only the cheapest is considered.
std::vector<BasicPair> lower_hull(std::vector<BasicPair> pairs);

struct HomoPlan {
  std::size_t N = 0;
  Rational mu;
  Rational gamma;  // share of the lo code
  BasicPair lo;
  BasicPair hi;
  Rational cost;
};

// Brackets mu between adjacent vertices of `hull`. Throws OutOfRange when mu
// lies outside the hull's mu range.
HomoPlan bracket_on_hull(const std::vector<BasicPair>& hull, std::size_t N, const Rational& mu);

// Throws OutOfRange unless 1/(N-3) <= mu <= 1 and mu is reachable by the hull.
HomoPlan plan_homo(std::size_t N, const Rational& mu);

// Sections (1-based) held by each database: entry n-1 lists n..n+R-1, cyclic.
std::vector<std::vector<std::size_t>> section_allocation(std::size_t N, std::size_t R);

// Databases (0-based) that hold section s (1-based).
std::vector<std::size_t> section_holders(std::size_t N, std::size_t R, std::size_t section);

StoragePlan to_storage_plan(const HomoPlan& homo, std::uint64_t seed = 1);

struct EvenGapReport {
  std::size_t N = 0;
  std::size_t R = 0;
  std::size_t K = 0;
  Rational mu;
  Rational even_cost;
  Rational reference_cost;  // odd-gap mixture, or hull value when R = N
  std::string reference;    // "neighbours" or "hull"
  bool comparable = true;   // false when mu lies beyond the hull
  bool dominated = false;   // reference_cost < even_cost
};

// Needs an admissible pair with even R - K.
EvenGapReport even_gap_dominance(std::size_t N, std::size_t R, std::size_t K);

struct CurveRow {
  std::string scheme;  // hybrid, divided or coded
  Rational mu;
  Rational cost;
  BasicPair lo;
  BasicPair hi;
  Rational gamma;
};

// Hull vertices plus a grid of mu samples (step 1/100) for the full pair set
// and the divided (K = 1) and coded (R = N) subsets.
std::vector<CurveRow> cost_curves(std::size_t N);
std::string curves_to_csv(const std::vector<CurveRow>& rows);

}  // namespace pruw
