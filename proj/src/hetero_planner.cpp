#include "pruw/hetero_planner.hpp"

#include <algorithm>

#include "pruw/error.hpp"

namespace pruw {

namespace {

std::size_t as_size(const BigInt& v) { return static_cast<std::size_t>(to_int64(v)); }

std::vector<Rational> excess(const std::vector<Rational>& values, const Rational& cap) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(positive_part(v - cap));
  return out;
}

Rational checked_ratio(const Rational& num, const Rational& den, const char* name) {
  if (den == 0) {
    throw Error(ErrorCode::kDegenerateHomogeneous,
                std::string(name) + " has a zero denominator; equal constraints need plan-homo");
  }
  return num / den;
}

// Splits `total` into two shares: first = m + (total-m-h) g, second = h + (total-m-h)(1-g).
void split_pair(const std::vector<Rational>& total, const std::vector<Rational>& m,
                const std::vector<Rational>& h, const Rational& g, std::vector<Rational>& first,
                std::vector<Rational>& second) {
  first.resize(total.size());
  second.resize(total.size());
  for (std::size_t n = 0; n < total.size(); ++n) {
    const Rational rest = total[n] - m[n] - h[n];
    first[n] = m[n] + rest * g;
    second[n] = h[n] + rest * (1 - g);
  }
}

Rational share_cost(std::size_t K, std::size_t R, const Rational& fraction) {
  return fraction == 0 ? Rational(0) : fraction * cost_function(K, R);
}

}  // namespace

void check_constraints(const std::vector<Rational>& mu) {
  if (mu.size() < 4) throw Error(ErrorCode::kInvalidInput, "need at least 4 databases");
  for (const auto& v : mu) {
    if (v <= 0 || v > 1) {
      throw Error(ErrorCode::kInvalidInput, "storage constraint " + to_fraction_string(v) + " outside (0, 1]");
    }
  }
  if (std::all_of(mu.begin(), mu.end(), [&](const Rational& v) { return v == mu.front(); })) {
    throw Error(ErrorCode::kDegenerateHomogeneous, "all constraints are equal; use plan-homo");
  }
}

DerivedParams derive_params(const std::vector<Rational>& mu, bool paper_rounded) {
  if (mu.empty()) throw Error(ErrorCode::kInvalidInput, "no constraints");
  DerivedParams out;
  out.k = 1 / *std::max_element(mu.begin(), mu.end());
  if (paper_rounded) out.k = truncate_decimal(out.k, 1);
  out.p = sum(mu);
  out.r = out.k * out.p;
  out.s = Rational(floor_of(out.k)) * out.p;
  return out;
}

C1Result compute_c1(const DerivedParams& params) {
  const std::size_t fk = as_size(floor_of(params.k));
  const std::size_t fs = as_size(floor_of(params.s));
  C1Result out;
  out.beta = Rational(fs + 1) - params.s;
  out.cost = share_cost(fk, fs, out.beta) + share_cost(fk, fs + 1, 1 - out.beta);
  return out;
}

C2Result compute_c2(const DerivedParams& params) {
  const Rational& k = params.k;
  const Rational& p = params.p;
  const Rational& r = params.r;
  if (is_integer(k)) throw Error(ErrorCode::kInvalidInput, "k is an integer; only C1 applies");
  const BigInt fk_big = floor_of(k);
  const BigInt fr_big = floor_of(r);
  const Rational fk(fk_big);
  const Rational ck = fk + 1;
  const Rational fr(fr_big);
  const Rational cr = fr + 1;
  const Rational r_frac = r - fr;
  const Rational k_frac = k - fk;
  const Rational alpha_floor = fk / k * (ck - k);

  C2Result out;
  if ((fr_big - fk_big) % 2 != 0) {
    const bool wide = r_frac > k_frac;
    out.alpha = wide && params.s <= fr ? fk * (p * ck - cr) / (ck * fr - fk * cr) : alpha_floor;
    out.beta = wide && params.s > fr ? (cr - r) / (ck - k) : Rational(1);
    out.delta = !wide ? 1 - r_frac / k_frac : Rational(0);
  } else {
    if (r_frac < ck - k) {
      out.alpha = alpha_floor;
      out.beta = 1 - r_frac / (ck - k);
    } else {
      out.alpha = fk * (p * ck - fr) / (ck * cr - fk * fr);
      out.beta = 0;
    }
    out.delta = 1;
  }
  const std::size_t a = as_size(fk_big);
  const std::size_t b = as_size(fr_big);
  out.cost = share_cost(a, b, out.alpha * out.beta) + share_cost(a, b + 1, out.alpha * (1 - out.beta)) +
             share_cost(a + 1, b, (1 - out.alpha) * out.delta) +
             share_cost(a + 1, b + 1, (1 - out.alpha) * (1 - out.delta));
  return out;
}

const CodeShare& AllocationTable::share(const std::string& label) const {
  for (const auto& s : shares) {
    if (s.label == label) return s;
  }
  throw Error(ErrorCode::kInvalidInput, "no share labelled " + label);
}

AllocationTable allocate_lemma0(const std::vector<Rational>& mu, const DerivedParams& params) {
  const std::size_t fk = as_size(floor_of(params.k));
  const std::size_t fs = as_size(floor_of(params.s));
  const Rational beta = Rational(fs + 1) - params.s;

  AllocationTable table;
  CodeShare lo{"mu_hat_1", fk, fs, beta, {}};
  CodeShare hi{"mu_hat_2", fk, fs + 1, 1 - beta, {}};
  if (beta == 1) {
    lo.allocation = mu;
    hi.allocation.assign(mu.size(), Rational(0));
  } else {
    const auto m = excess(mu, (params.s - fs) / fk);
    const auto h = excess(mu, beta / fk);
    const Rational g = checked_ratio(Rational(fs) / fk * beta - sum(m), params.p - sum(m) - sum(h), "gamma~");
    table.gammas.tilde = g;
    split_pair(mu, m, h, g, lo.allocation, hi.allocation);
  }
  table.shares = {std::move(lo), std::move(hi)};
  return table;
}

AllocationTable allocate_lemma1(const std::vector<Rational>& mu, const DerivedParams& params,
                                const Rational& alpha, const Rational& beta, const Rational& delta) {
  const std::size_t a = as_size(floor_of(params.k));
  const std::size_t b = as_size(floor_of(params.r));
  const Rational fk(a);
  const Rational ck = fk + 1;
  const Rational fr(b);
  const Rational cr = fr + 1;

  AllocationTable table;
  const Rational hat_total = alpha / fk * (cr - beta);
  std::vector<Rational> mu_hat;
  std::vector<Rational> mu_bar;
  if (alpha == 1) {
    // Only the floor(k) codes are used; C2 coincides with a C1-type plan.
    mu_hat = mu;
    mu_bar.assign(mu.size(), Rational(0));
  } else {
    const auto m = excess(mu, (1 - alpha) / ck);
    const auto h = excess(mu, alpha / fk);
    const Rational g = checked_ratio(hat_total - sum(m), params.p - sum(m) - sum(h), "gamma");
    table.gammas.main = g;
    split_pair(mu, m, h, g, mu_hat, mu_bar);
  }

  CodeShare hat1{"mu_hat_1", a, b, alpha * beta, {}};
  CodeShare hat2{"mu_hat_2", a, b + 1, alpha * (1 - beta), {}};
  if (beta == 0 || beta == 1) {
    for (const auto& v : mu_hat) {
      hat1.allocation.push_back(v * beta);
      hat2.allocation.push_back(v * (1 - beta));
    }
  } else {
    const auto mh = excess(mu_hat, alpha * (1 - beta) / fk);
    const auto hh = excess(mu_hat, alpha * beta / fk);
    const Rational gh = checked_ratio(alpha * beta / fk * fr - sum(mh), hat_total - sum(mh) - sum(hh), "gamma^");
    table.gammas.hat = gh;
    split_pair(mu_hat, mh, hh, gh, hat1.allocation, hat2.allocation);
  }

  CodeShare bar1{"mu_bar_1", a + 1, b, (1 - alpha) * delta, {}};
  CodeShare bar2{"mu_bar_2", a + 1, b + 1, (1 - alpha) * (1 - delta), {}};
  if (delta == 0 || delta == 1) {
    for (const auto& v : mu_bar) {
      bar1.allocation.push_back(v * delta);
      bar2.allocation.push_back(v * (1 - delta));
    }
  } else {
    const Rational bar_total = (1 - alpha) / ck * (cr - delta);
    const auto mb = excess(mu_bar, (1 - alpha) * (1 - delta) / ck);
    const auto hb = excess(mu_bar, (1 - alpha) * delta / ck);
    const Rational gb =
        checked_ratio((1 - alpha) * delta / ck * fr - sum(mb), bar_total - sum(mb) - sum(hb), "gamma-bar");
    table.gammas.bar = gb;
    split_pair(mu_bar, mb, hb, gb, bar1.allocation, bar2.allocation);
  }
  table.shares = {std::move(hat1), std::move(hat2), std::move(bar1), std::move(bar2)};
  return table;
}

std::vector<std::string> allocation_violations(const AllocationTable& table,
                                               const std::vector<Rational>& mu) {
  std::vector<std::string> out;
  std::vector<Rational> totals(mu.size());
  for (const auto& s : table.shares) {
    if (s.allocation.size() != mu.size()) {
      out.push_back(s.label + ": wrong length");
      continue;
    }
    if (s.fraction < 0 || s.fraction > 1) out.push_back(s.label + ": fraction outside [0, 1]");
    const Rational cap = s.fraction / s.K;
    for (std::size_t n = 0; n < mu.size(); ++n) {
      const auto& v = s.allocation[n];
      if (v < 0) out.push_back(s.label + ": negative at n=" + std::to_string(n + 1));
      if (v > cap) out.push_back(s.label + ": above cap at n=" + std::to_string(n + 1));
      totals[n] += v;
    }
    if (sum(s.allocation) != s.fraction * s.R / s.K) out.push_back(s.label + ": wrong column sum");
  }
  for (std::size_t n = 0; n < mu.size(); ++n) {
    if (totals[n] != mu[n]) out.push_back("shares of n=" + std::to_string(n + 1) + " do not add to mu");
  }
  for (const auto* g : {&table.gammas.tilde, &table.gammas.main, &table.gammas.hat, &table.gammas.bar}) {
    if (g->has_value() && (**g < 0 || **g > 1)) out.push_back("gamma " + to_fraction_string(**g) + " outside [0, 1]");
  }
  return out;
}

std::vector<std::string> mixture_violations(const DerivedParams& params, const C2Result& c2) {
  std::vector<std::string> out;
  const Rational fk(floor_of(params.k));
  const Rational ck = fk + 1;
  const Rational fr(floor_of(params.r));
  const Rational cr = fr + 1;
  const Rational r_frac = params.r - fr;
  if (c2.alpha <= 0 || c2.alpha > 1) out.push_back("alpha outside (0, 1]");
  if (c2.beta < 0 || c2.beta > 1) out.push_back("beta outside [0, 1]");
  if (c2.delta < 0 || c2.delta > 1) out.push_back("delta outside [0, 1]");
  if (!out.empty()) return out;
  if (c2.alpha < fk / params.k * (ck - params.k)) out.push_back("alpha below its lower bound");
  if (c2.beta < positive_part(1 - fk / (params.k * c2.alpha) * r_frac)) out.push_back("beta below its lower bound");
  if (c2.alpha < 1 && c2.delta < positive_part(1 - ck / (params.k * (1 - c2.alpha)) * r_frac)) {
    out.push_back("delta below its lower bound");
  }
  const Rational balance = c2.alpha / fk * (cr - c2.beta) + (1 - c2.alpha) / ck * (cr - c2.delta);
  if (balance != params.p) out.push_back("storage balance gives " + to_fraction_string(balance) + " != p");
  return out;
}

HeteroResult plan_hetero_detailed(const std::vector<Rational>& mu, const HeteroOptions& options) {
  check_constraints(mu);
  HeteroResult res;
  res.params = derive_params(mu, options.paper_rounded);
  try {
    res.c1 = compute_c1(res.params);
  } catch (const Error& e) {
    res.c1_note = e.what();
  }
  try {
    res.c2 = compute_c2(res.params);
  } catch (const Error& e) {
    res.c2_note = e.what();
  }
  if (!res.c1 && !res.c2) {
    throw Error(ErrorCode::kInfeasibleCode, "neither mixture is admissible (C1: " + res.c1_note +
                                                "; C2: " + res.c2_note + ")");
  }

  StoragePlan& plan = res.plan;
  plan.kind = PlanKind::kHeterogeneous;
  plan.N = mu.size();
  plan.constraints = mu;
  plan.derived = {{"k", res.params.k}, {"p", res.params.p}, {"r", res.params.r}, {"s", res.params.s}};
  if (res.c1) {
    plan.mixture["c1"] = res.c1->cost;
    plan.mixture["beta_tilde"] = res.c1->beta;
  }
  if (res.c2) {
    plan.mixture["c2"] = res.c2->cost;
    plan.mixture["alpha"] = res.c2->alpha;
    plan.mixture["beta"] = res.c2->beta;
    plan.mixture["delta"] = res.c2->delta;
  }

  const bool use_c2 = res.c2 && (!res.c1 || res.c2->cost <= res.c1->cost);
  if (use_c2) {
    plan.branch = "C2";
    plan.predicted_cost = res.c2->cost;
    const auto bad = mixture_violations(res.params, *res.c2);
    if (!bad.empty()) throw Error(ErrorCode::kInvariantViolation, "C2 mixture: " + bad.front());
    res.table = allocate_lemma1(mu, res.params, res.c2->alpha, res.c2->beta, res.c2->delta);
  } else {
    plan.branch = "C1";
    plan.predicted_cost = res.c1->cost;
    res.table = allocate_lemma0(mu, res.params);
  }
  const auto bad = allocation_violations(res.table, mu);
  if (!bad.empty()) throw Error(ErrorCode::kInvariantViolation, "allocation: " + bad.front());

  for (const auto& share : res.table.shares) {
    if (share.fraction == 0) continue;
    Segment seg;
    seg.label = share.label;
    seg.code = derive_code(share.K, share.R);
    seg.fraction = share.fraction;
    seg.allocation = share.allocation;
    auto sol = solve_partition(share.allocation, share.K, share.R);
    if (sol.fraction != share.fraction) {
      throw Error(ErrorCode::kInvariantViolation, share.label + ": partition fraction mismatch");
    }
    seg.partition = std::move(sol.entries);
    seg.seed = options.seed + plan.segments.size();
    plan.segments.push_back(std::move(seg));
  }
  validate_plan(plan);
  return res;
}

StoragePlan plan_hetero(const std::vector<Rational>& mu, const HeteroOptions& options) {
  return plan_hetero_detailed(mu, options).plan;
}

StoragePlan plan_single_code(const std::vector<Rational>& mu, std::size_t K, std::size_t R,
                             std::uint64_t seed) {
  if (mu.size() < 4) throw Error(ErrorCode::kInvalidInput, "need at least 4 databases");
  const CodeSpec code = derive_code(K, R);
  if (R > mu.size()) throw Error(ErrorCode::kInfeasibleCode, "R exceeds the number of databases");
  auto sol = solve_partition(mu, K, R);
  if (sol.fraction != 1) {
    throw Error(ErrorCode::kInfeasibleAllocation,
                "a single (K, R) code fills every database only when R = K p; here K p = " +
                    to_fraction_string(sum(mu) * K));
  }
  StoragePlan plan;
  plan.kind = PlanKind::kHeterogeneous;
  plan.N = mu.size();
  plan.constraints = mu;
  plan.branch = "forced";
  plan.derived = {{"p", sum(mu)}};
  Segment seg{"forced", code, Rational(1), mu, std::move(sol.entries), seed};
  plan.segments.push_back(std::move(seg));
  plan.predicted_cost = mixture_cost(plan);
  validate_plan(plan);
  return plan;
}

}  // namespace pruw
