#include "pruw/plan.hpp"

#include "json.hpp"

#include "pruw/error.hpp"

namespace pruw {

namespace {

using nlohmann::json;

json fraction_map(const std::map<std::string, Rational>& values) {
  json out = json::object();
  for (const auto& [key, v] : values) out[key] = to_fraction_string(v);
  return out;
}

std::map<std::string, Rational> parse_fraction_map(const json& j) {
  std::map<std::string, Rational> out;
  for (const auto& [key, v] : j.items()) out[key] = parse_rational(v.get<std::string>());
  return out;
}

json fraction_list(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_fraction_string(v));
  return out;
}

std::vector<Rational> parse_fraction_list(const json& j) {
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(parse_rational(v.get<std::string>()));
  return out;
}

}  // namespace

Rational cost_function(std::size_t a, std::size_t b) {
  if (!is_admissible_code(a, b)) {
    throw Error(ErrorCode::kInfeasibleCode, "C_T(" + std::to_string(a) + ", " + std::to_string(b) +
                                                ") needs b-a >= 3 (odd) or b-a >= 4 (even)");
  }
  const auto ai = static_cast<std::int64_t>(a);
  const auto bi = static_cast<std::int64_t>(b);
  if ((b - a) % 2 == 1) return make_rational(4 * bi, bi - ai - 1);
  return make_rational(4 * bi - 2, bi - ai - 2);
}

Rational mixture_cost(const StoragePlan& plan) {
  Rational total = 0;
  for (const auto& seg : plan.segments) total += seg.fraction * cost_function(seg.code.K, seg.code.R);
  return total;
}

void validate_plan(const StoragePlan& plan) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvariantViolation, msg); };
  if (plan.constraints.size() != plan.N) fail("constraint count != N");
  Rational fractions = 0;
  std::vector<Rational> stored(plan.N);
  for (const auto& seg : plan.segments) {
    if (seg.code != derive_code(seg.code.K, seg.code.R)) fail("segment " + seg.label + ": bad code");
    if (seg.fraction <= 0) fail("segment " + seg.label + ": non-positive fraction");
    if (seg.allocation.size() != plan.N) fail("segment " + seg.label + ": allocation size");
    fractions += seg.fraction;
    Rational etas = 0;
    for (const auto& e : seg.partition) {
      if (e.eta <= 0) fail("segment " + seg.label + ": non-positive eta");
      if (e.subset.size() != seg.code.R) fail("segment " + seg.label + ": subset size != R");
      etas += e.eta;
    }
    if (etas != 1) fail("segment " + seg.label + ": etas do not sum to 1");
    const PartitionSolution sol{seg.fraction, seg.partition};
    if (reconstruct_allocation(sol, plan.N, seg.code.K) != seg.allocation) {
      fail("segment " + seg.label + ": partition does not reproduce allocation");
    }
    for (std::size_t n = 0; n < plan.N; ++n) stored[n] += seg.allocation[n];
  }
  if (fractions != 1) fail("segment fractions sum to " + to_fraction_string(fractions));
  if (stored != plan.constraints) fail("databases are not filled exactly");
  if (mixture_cost(plan) != plan.predicted_cost) fail("predicted cost != segment mixture");
}

std::string plan_kind_name(PlanKind kind) {
  return kind == PlanKind::kHeterogeneous ? "heterogeneous" : "homogeneous";
}

std::string plan_to_json(const StoragePlan& plan) {
  json j;
  j["schema"] = 1;
  j["plan_kind"] = plan_kind_name(plan.kind);
  j["N"] = plan.N;
  j["constraints"] = fraction_list(plan.constraints);
  j["derived"] = fraction_map(plan.derived);
  j["branch"] = plan.branch;
  j["mixture"] = fraction_map(plan.mixture);
  j["predicted_cost"] = to_fraction_string(plan.predicted_cost);
  j["predicted_cost_decimal"] = to_decimal_string(plan.predicted_cost);
  json segments = json::array();
  json seeds = json::array();
  for (const auto& seg : plan.segments) {
    json s;
    s["label"] = seg.label;
    s["code"] = {{"K", seg.code.K}, {"R", seg.code.R}, {"x", seg.code.x}, {"y", seg.code.y}};
    s["fraction"] = to_fraction_string(seg.fraction);
    s["allocation"] = fraction_list(seg.allocation);
    json parts = json::array();
    for (const auto& e : seg.partition) {
      json subset = json::array();
      for (std::size_t n : e.subset) subset.push_back(n + 1);
      parts.push_back({{"eta", to_fraction_string(e.eta)}, {"subset", subset}});
    }
    s["partition"] = parts;
    segments.push_back(s);
    seeds.push_back(seg.seed);
  }
  j["segments"] = segments;
  j["seeds"] = seeds;
  return j.dump(2) + "\n";
}

StoragePlan plan_from_json(const std::string& text) {
  StoragePlan plan;
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<int>() != 1) throw Error(ErrorCode::kInvalidInput, "unsupported plan schema");
    const auto kind = j.at("plan_kind").get<std::string>();
    if (kind == "heterogeneous") {
      plan.kind = PlanKind::kHeterogeneous;
    } else if (kind == "homogeneous") {
      plan.kind = PlanKind::kHomogeneous;
    } else {
      throw Error(ErrorCode::kInvalidInput, "unknown plan_kind " + kind);
    }
    plan.N = j.at("N").get<std::size_t>();
    plan.constraints = parse_fraction_list(j.at("constraints"));
    plan.derived = parse_fraction_map(j.at("derived"));
    plan.branch = j.at("branch").get<std::string>();
    plan.mixture = parse_fraction_map(j.at("mixture"));
    plan.predicted_cost = parse_rational(j.at("predicted_cost").get<std::string>());
    const auto& seeds = j.at("seeds");
    const auto& segments = j.at("segments");
    if (seeds.size() != segments.size()) throw Error(ErrorCode::kInvalidInput, "one seed per segment");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& s = segments[i];
      Segment seg;
      seg.label = s.at("label").get<std::string>();
      seg.code = derive_code(s.at("code").at("K").get<std::size_t>(), s.at("code").at("R").get<std::size_t>());
      if (s.at("code").at("x").get<std::size_t>() != seg.code.x ||
          s.at("code").at("y").get<std::size_t>() != seg.code.y) {
        throw Error(ErrorCode::kInvalidInput, "segment " + seg.label + ": x, y disagree with K, R");
      }
      seg.fraction = parse_rational(s.at("fraction").get<std::string>());
      seg.allocation = parse_fraction_list(s.at("allocation"));
      for (const auto& e : s.at("partition")) {
        PartitionEntry entry;
        entry.eta = parse_rational(e.at("eta").get<std::string>());
        for (const auto& n : e.at("subset")) {
          const auto idx = n.get<std::size_t>();
          if (idx < 1 || idx > plan.N) throw Error(ErrorCode::kBadIndex, "subset index out of range");
          entry.subset.push_back(idx - 1);
        }
        seg.partition.push_back(std::move(entry));
      }
      seg.seed = seeds[i].get<std::uint64_t>();
      plan.segments.push_back(std::move(seg));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed plan file: ") + e.what());
  }
  return plan;
}

}  // namespace pruw
