#include "pruw/homo_planner.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pruw/error.hpp"

namespace pruw {

namespace {

// Cross product of (a - o) and (b - o).
Rational cross(const BasicPair& o, const BasicPair& a, const BasicPair& b) {
  return (a.mu - o.mu) * (b.cost - o.cost) - (a.cost - o.cost) * (b.mu - o.mu);
}

bool pair_order(const BasicPair& a, const BasicPair& b) {
  if (a.mu != b.mu) return a.mu < b.mu;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.R < b.R;
}

}  // namespace

std::vector<BasicPair> basic_pairs(std::size_t N) {
  if (N < 4) throw Error(ErrorCode::kInvalidInput, "need N >= 4");
  std::vector<BasicPair> out;
  for (std::size_t R = 4; R <= N; ++R) {
    for (std::size_t K = 1; K + 3 <= R; ++K) {
      if ((R - K) % 2 == 0) continue;
      out.push_back(BasicPair{R, K, make_rational(static_cast<std::int64_t>(R), static_cast<std::int64_t>(N * K)),
                              cost_function(K, R)});
    }
  }
  std::sort(out.begin(), out.end(), pair_order);
  return out;
}

std::vector<BasicPair> lower_hull(std::vector<BasicPair> pairs) {
  std::sort(pairs.begin(), pairs.end(), pair_order);
  std::vector<BasicPair> unique;
  for (const auto& p : pairs) {
    if (unique.empty() || unique.back().mu != p.mu) unique.push_back(p);
  }
  std::vector<BasicPair> hull;
  for (const auto& p : unique) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) < 0) hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

HomoPlan bracket_on_hull(const std::vector<BasicPair>& hull, std::size_t N, const Rational& mu) {
  if (hull.empty()) throw Error(ErrorCode::kInvalidInput, "empty hull");
  if (mu < hull.front().mu || mu > hull.back().mu) {
    throw Error(ErrorCode::kOutOfRange, "mu=" + to_fraction_string(mu) + " outside the reachable range [" +
                                            to_fraction_string(hull.front().mu) + ", " +
                                            to_fraction_string(hull.back().mu) + "]");
  }
  HomoPlan plan;
  plan.N = N;
  plan.mu = mu;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (hull[i].mu == mu) {
      plan.lo = plan.hi = hull[i];
      plan.gamma = 1;
      plan.cost = hull[i].cost;
      return plan;
    }
    if (i + 1 < hull.size() && hull[i].mu < mu && mu < hull[i + 1].mu) {
      plan.lo = hull[i];
      plan.hi = hull[i + 1];
      plan.gamma = (plan.hi.mu - mu) / (plan.hi.mu - plan.lo.mu);
      plan.cost = plan.gamma * plan.lo.cost + (1 - plan.gamma) * plan.hi.cost;
      return plan;
    }
  }
  throw Error(ErrorCode::kInvariantViolation, "hull bracketing failed");
}

HomoPlan plan_homo(std::size_t N, const Rational& mu) {
  if (N < 4) throw Error(ErrorCode::kInvalidInput, "need N >= 4");
  const Rational floor_mu = make_rational(1, static_cast<std::int64_t>(N) - 3);
  if (mu < floor_mu || mu > 1) {
    throw Error(ErrorCode::kOutOfRange, "mu=" + to_fraction_string(mu) + " outside [" +
                                            to_fraction_string(floor_mu) + ", 1]");
  }
  return bracket_on_hull(lower_hull(basic_pairs(N)), N, mu);
}

std::vector<std::vector<std::size_t>> section_allocation(std::size_t N, std::size_t R) {
  if (R < 1 || R > N) throw Error(ErrorCode::kInvalidInput, "need 1 <= R <= N");
  std::vector<std::vector<std::size_t>> out(N);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < R; ++t) out[n].push_back((n + t) % N + 1);
  }
  return out;
}

std::vector<std::size_t> section_holders(std::size_t N, std::size_t R, std::size_t section) {
  if (section < 1 || section > N) throw Error(ErrorCode::kBadIndex, "section out of range");
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < N; ++n) {
    // database n+1 holds sections n+1 .. n+R (cyclic)
    const std::size_t offset = (section - 1 + N - n) % N;
    if (offset < R) out.push_back(n);
  }
  return out;
}

StoragePlan to_storage_plan(const HomoPlan& homo, std::uint64_t seed) {
  const std::size_t N = homo.N;
  StoragePlan plan;
  plan.kind = PlanKind::kHomogeneous;
  plan.N = N;
  plan.constraints.assign(N, homo.mu);
  plan.derived = {{"mu", homo.mu}, {"gamma", homo.gamma}};
  plan.branch = "hull";
  plan.mixture = {{"gamma", homo.gamma}, {"cost_lo", homo.lo.cost}, {"cost_hi", homo.hi.cost}};

  std::vector<std::pair<const BasicPair*, Rational>> parts;
  if (homo.lo == homo.hi) {
    parts.emplace_back(&homo.lo, Rational(1));
  } else {
    if (homo.gamma != 0) parts.emplace_back(&homo.lo, homo.gamma);
    if (homo.gamma != 1) parts.emplace_back(&homo.hi, 1 - homo.gamma);
  }
  for (const auto& [pair, fraction] : parts) {
    Segment seg;
    seg.label = "K" + std::to_string(pair->K) + "_R" + std::to_string(pair->R);
    seg.code = derive_code(pair->K, pair->R);
    seg.fraction = fraction;
    seg.allocation.assign(N, fraction * pair->mu);
    // Identical holder sets (R = N) are merged into one entry.
    std::map<std::vector<std::size_t>, Rational> merged;
    std::vector<std::vector<std::size_t>> order;
    for (std::size_t s = 1; s <= N; ++s) {
      auto holders = section_holders(N, pair->R, s);
      if (!merged.count(holders)) order.push_back(holders);
      merged[holders] += make_rational(1, static_cast<std::int64_t>(N));
    }
    for (auto& holders : order) seg.partition.push_back(PartitionEntry{merged[holders], holders});
    seg.seed = seed + plan.segments.size();
    plan.segments.push_back(std::move(seg));
  }
  plan.predicted_cost = homo.cost;
  validate_plan(plan);
  return plan;
}

EvenGapReport even_gap_dominance(std::size_t N, std::size_t R, std::size_t K) {
  if (!is_admissible_code(K, R) || (R - K) % 2 != 0 || R > N) {
    throw Error(ErrorCode::kInvalidInput, "need an admissible even-gap pair with R <= N");
  }
  EvenGapReport rep;
  rep.N = N;
  rep.R = R;
  rep.K = K;
  rep.mu = make_rational(static_cast<std::int64_t>(R), static_cast<std::int64_t>(N * K));
  rep.even_cost = cost_function(K, R);
  if (R + 1 <= N) {
    // mu sits halfway between (R-1)/(NK) and (R+1)/(NK).
    rep.reference = "neighbours";
    rep.reference_cost = (cost_function(K, R - 1) + cost_function(K, R + 1)) / 2;
  } else {
    rep.reference = "hull";
    const auto hull = lower_hull(basic_pairs(N));
    if (rep.mu < hull.front().mu || rep.mu > hull.back().mu) {
      rep.comparable = false;
      return rep;
    }
    rep.reference_cost = bracket_on_hull(hull, N, rep.mu).cost;
  }
  rep.dominated = rep.reference_cost < rep.even_cost;
  return rep;
}

std::vector<CurveRow> cost_curves(std::size_t N) {
  const auto all = basic_pairs(N);
  std::vector<std::pair<std::string, std::vector<BasicPair>>> schemes;
  schemes.emplace_back("hybrid", all);
  std::vector<BasicPair> divided;
  std::vector<BasicPair> coded;
  for (const auto& p : all) {
    if (p.K == 1) divided.push_back(p);
    if (p.R == N) coded.push_back(p);
  }
  schemes.emplace_back("divided", divided);
  schemes.emplace_back("coded", coded);

  std::vector<CurveRow> rows;
  for (const auto& [name, pairs] : schemes) {
    if (pairs.empty()) continue;
    const auto hull = lower_hull(pairs);
    std::vector<Rational> points;
    for (const auto& v : hull) points.push_back(v.mu);
    for (int i = 1; i <= 100; ++i) {
      const Rational mu = make_rational(i, 100);
      if (mu >= hull.front().mu && mu <= hull.back().mu) points.push_back(mu);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (const auto& mu : points) {
      const auto plan = bracket_on_hull(hull, N, mu);
      rows.push_back(CurveRow{name, mu, plan.cost, plan.lo, plan.hi, plan.gamma});
    }
  }
  return rows;
}

std::string curves_to_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "scheme,mu,mu_exact,cost,cost_exact,R_lo,K_lo,R_hi,K_hi,gamma\r\n";
  for (const auto& r : rows) {
    os << r.scheme << ',' << to_decimal_string(r.mu) << ',' << to_fraction_string(r.mu) << ','
       << to_decimal_string(r.cost) << ',' << to_fraction_string(r.cost) << ',' << r.lo.R << ','
       << r.lo.K << ',' << r.hi.R << ',' << r.hi.K << ',' << to_fraction_string(r.gamma) << "\r\n";
  }
  return os.str();
}

}  // namespace pruw
