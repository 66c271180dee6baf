#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "../oracles/corpus.hpp"
#include "../oracles/oracles.hpp"
#include "pruw/error.hpp"
#include "pruw/framing.hpp"
#include "pruw/hetero_planner.hpp"
#include "pruw/homo_planner.hpp"
#include "pruw/simulator.hpp"

using namespace pruw;

namespace {

ErrorCode code_of(auto&& fn, std::string* what = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no pruw::Error thrown";
  return ErrorCode::kInvariantViolation;
}

// One (K, R) code over exactly R databases, each holding 1/K of the model.
StoragePlan single(std::size_t K, std::size_t R) {
  return plan_single_code(std::vector<Rational>(R, make_rational(1, static_cast<std::int64_t>(K))), K, R, 9);
}

StoragePlan homo8() { return to_storage_plan(plan_homo(8, make_rational(7, 10)), 1); }

std::size_t small_L(const StoragePlan& plan, std::size_t at_least = 1) {
  const auto m = static_cast<std::size_t>(minimal_L(plan));
  return m * ((at_least + m - 1) / m);
}

}  // namespace

TEST(Simulator, FullReplicaOccupancy) {
  const auto plan = plan_single_code(std::vector<Rational>(4, Rational(1)), 1, 4);
  auto sys = init_system(plan, 3, small_L(plan, 12), 5);
  EXPECT_TRUE(occupancy_violations(sys).empty());
  for (const auto& db : sys.databases) EXPECT_EQ(db.symbol_count(), sys.M * sys.L);
}

TEST(Simulator, OccupancyMatchesConstraints) {
  const auto plan = homo8();
  auto sys = init_system(plan, 2, 400, 1);
  for (std::size_t n = 0; n < 8; ++n) {
    EXPECT_EQ(Rational(sys.databases[n].symbol_count()), plan.constraints[n] * 2 * 400);
  }
  const auto twelve = plan_hetero(
      [] {
        std::vector<Rational> mu(5, make_rational(37, 100));
        mu.insert(mu.end(), 7, make_rational(35, 100));
        return mu;
      }(),
      HeteroOptions{true, 1});
  EXPECT_EQ(minimal_L(twelve), 70200);
}

TEST(Simulator, SameSeedSameShards) {
  const auto plan = homo8();
  const auto a = init_system(plan, 2, 400, 77);
  const auto b = init_system(plan, 2, 400, 77);
  const auto c = init_system(plan, 2, 400, 78);
  bool any_diff = false;
  for (std::size_t n = 0; n < 8; ++n) {
    ASSERT_EQ(a.databases[n].shards().size(), b.databases[n].shards().size());
    for (const auto& [id, shard] : a.databases[n].shards()) {
      EXPECT_EQ(shard.symbols, b.databases[n].shard(id).symbols);
      any_diff = any_diff || shard.symbols != c.databases[n].shard(id).symbols;
    }
  }
  EXPECT_TRUE(any_diff);
}

TEST(Simulator, ReadsEverySubmodel) {
  auto sys = init_system(homo8(), 4, 400, 3);
  for (std::size_t theta = 0; theta < 4; ++theta) {
    const auto before = sys.ledger;
    const auto res = run_read(sys, theta);
    EXPECT_EQ(res.submodel, sys.model[theta]) << theta;
    EXPECT_EQ(res.ledger.useful_read, 400u);
    EXPECT_EQ(sys.ledger.downloaded - before.downloaded, res.ledger.downloaded);
  }
  EXPECT_EQ(code_of([&] { (void)run_read(sys, 4); }), ErrorCode::kBadIndex);
}

// The test keeps its own copy of the model, so correctness does not rest on
// the simulator's bookkeeping.
TEST(Simulator, WriteReadRounds) {
  auto sys = init_system(single(2, 7), 3, small_L(single(2, 7), 8), 11);
  std::vector<FieldVector> expect = sys.model;
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t theta = rng() % 3;
    const auto delta = sys.field.random_vector(sys.L, rng);
    (void)run_write(sys, theta, delta);
    for (std::size_t i = 0; i < sys.L; ++i) expect[theta][i] += delta[i];
    for (std::size_t m = 0; m < 3; ++m) ASSERT_EQ(run_read(sys, m).submodel, expect[m]) << "round " << t;
  }
}

TEST(Simulator, ZeroDeltaKeepsModel) {
  auto sys = init_system(homo8(), 2, 400, 8);
  const auto before = run_read(sys, 1).submodel;
  (void)run_write(sys, 1, sys.field.zeros(sys.L));
  EXPECT_EQ(run_read(sys, 1).submodel, before);
  EXPECT_EQ(run_read(sys, 0).submodel, sys.model[0]);
}

TEST(Simulator, RejectsBadSizes) {
  std::string what;
  EXPECT_EQ(code_of([] { (void)init_system(homo8(), 2, 7, 1); }, &what), ErrorCode::kIndivisibleL);
  EXPECT_NE(what.find("400"), std::string::npos) << what;
  EXPECT_EQ(code_of([] { (void)init_system(homo8(), 2, 600, 1); }), ErrorCode::kIndivisibleL);
  EXPECT_EQ(code_of([] { (void)init_system(homo8(), 1, 400, 1); }), ErrorCode::kInvalidInput);
  auto sys = init_system(homo8(), 2, 400, 1);
  EXPECT_EQ(code_of([&] { (void)run_write(sys, 0, sys.field.zeros(10)); }), ErrorCode::kDimensionMismatch);
}

TEST(Simulator, MeasuredCostsEqualFormulas) {
  for (auto [K, R, cost] : {std::tuple{2u, 7u, 7}, {1u, 4u, 8}, {3u, 11u, 7}, {2u, 8u, 15}}) {
    const auto plan = single(K, R);
    auto sys = init_system(plan, 2, small_L(plan, 4), 2);
    const auto rep = measure_vs_theory(sys, 5);
    EXPECT_TRUE(rep.all_equal) << K << "," << R;
    EXPECT_EQ(rep.mismatches, 0u);
    const Rational expected = (K == 2 && R == 8) ? make_rational(15, 2) : Rational(cost);
    EXPECT_EQ(rep.blended.measured_total, expected) << K << "," << R;
    const auto [read, write] = oracle::counted_costs(K, R);
    EXPECT_EQ(rep.blended.measured_read, read);
    EXPECT_EQ(rep.blended.measured_write, write);
  }
  auto sys = init_system(homo8(), 2, 400, 6);
  const auto rep = measure_vs_theory(sys, 10);
  EXPECT_TRUE(rep.all_equal);
  EXPECT_EQ(rep.blended.measured_total, make_rational(154, 25));
  ASSERT_EQ(rep.segments.size(), 2u);
  EXPECT_EQ(rep.segments[0].measured_total, 7);
  EXPECT_EQ(rep.segments[1].measured_total, 6);
}

TEST(Simulator, TranscriptFramesAndTheta) {
  auto sys = init_system(homo8(), 3, 400, 12);
  std::stringstream frames;
  Transcript t;
  t.frames = &frames;
  (void)measure_vs_theory(sys, 4, &t);
  ASSERT_EQ(t.rounds.size(), 4u);
  for (const auto& r : t.rounds) {
    EXPECT_FALSE(r.theta.has_value());
    EXPECT_FALSE(r.theta_hash.empty());
    EXPECT_TRUE(r.read_ok && r.write_ok);
  }
  std::size_t counts[5] = {0, 0, 0, 0, 0};
  Frame f;
  while (read_frame(frames, f)) {
    EXPECT_EQ(f.header.q, kSimulationPrime);
    EXPECT_EQ(f.header.M, 3u);
    const auto kind = static_cast<std::uint64_t>(f.header.kind);
    ASSERT_TRUE(kind >= 2 && kind <= 4);
    ++counts[kind];
    for (auto v : f.values) EXPECT_LT(v, kSimulationPrime);
  }
  EXPECT_GT(counts[2], 0u);
  EXPECT_EQ(counts[2], counts[3]);  // one answer per query
  EXPECT_EQ(counts[4], counts[2]);  // both codes have an empty null set

  Transcript dbg;
  dbg.debug_theta = true;
  (void)measure_vs_theory(sys, 6, &dbg);
  std::set<std::string> hashes;
  for (const auto& r : dbg.rounds) {
    ASSERT_TRUE(r.theta.has_value());
    hashes.insert(r.theta_hash);
  }
  // Keyed by round as well, so repeated reads of one submodel do not link.
  EXPECT_EQ(hashes.size(), dbg.rounds.size());

  // Even gap (2, 8): x = 3, y = 2, so one database per instance skips the upload.
  const auto plan = single(2, 8);
  auto even = init_system(plan, 2, small_L(plan, 4), 12);
  std::stringstream ef;
  Transcript et;
  et.frames = &ef;
  (void)measure_vs_theory(even, 2, &et);
  std::size_t q = 0, u = 0;
  while (read_frame(ef, f)) {
    q += f.header.kind == FrameKind::kQuery;
    u += f.header.kind == FrameKind::kUpdate;
  }
  EXPECT_EQ(u * 8, q * 7);
}

TEST(Simulator, MinimalLMatchesSearch) {
  std::vector<StoragePlan> plans;
  for (std::size_t N = 5; N <= 10; ++N) {
    const auto hull = lower_hull(basic_pairs(N));
    plans.push_back(to_storage_plan(plan_homo(N, (hull.front().mu + hull.back().mu) / 2), 1));
    plans.push_back(to_storage_plan(plan_homo(N, hull.back().mu), 1));
  }
  const auto corpus = oracle::hetero_corpus(60, 21);
  for (const auto& item : corpus.items) {
    if (minimal_L(item.result.plan) <= 20000) plans.push_back(item.result.plan);
  }
  ASSERT_GT(plans.size(), 15u);
  for (const auto& plan : plans) {
    const auto brute = oracle::brute_min_L(plan, 20000);
    ASSERT_TRUE(brute.has_value());
    EXPECT_EQ(minimal_L(plan), *brute);
  }
}

// A sample of random heterogeneous plans fills every database exactly.
TEST(SimulatorProperty, CorpusOccupancy) {
  const auto corpus = oracle::hetero_corpus(80, 31);
  std::size_t simulated = 0;
  for (const auto& item : corpus.items) {
    const auto L = minimal_L(item.result.plan);
    if (L > 5000) continue;
    auto sys = init_system(item.result.plan, 2, static_cast<std::size_t>(L), 1);
    EXPECT_TRUE(occupancy_violations(sys).empty());
    EXPECT_TRUE(model_consistent(sys));
    ++simulated;
  }
  EXPECT_GT(simulated, 3u);
}
