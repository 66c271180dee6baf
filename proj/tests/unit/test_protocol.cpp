#include <gtest/gtest.h>

#include <numeric>

#include "../oracles/oracles.hpp"
#include "pruw/error.hpp"
#include "pruw/protocol.hpp"

using namespace pruw;

namespace {

std::vector<std::uint64_t> raw(std::span<const FieldElement> v) {
  std::vector<std::uint64_t> out;
  for (const auto& e : v) out.push_back(e.value());
  return out;
}

// One instance over databases 0..R-1 with a random model.
struct Bench {
  PrimeField field;
  CodeSpec spec;
  EvalConstants consts;
  std::vector<std::size_t> participants;
  std::size_t M;
  std::vector<PlainSubpacket> model;
  std::vector<ShardState> shards;

  Bench(std::size_t K, std::size_t R, std::size_t M_, std::size_t subpackets, std::uint64_t seed,
        std::uint64_t q = kSimulationPrime)
      : field(q),
        spec(derive_code(K, R)),
        consts(gen_eval_constants(field, R, spec.y, K, seed)),
        participants(R),
        M(M_) {
    std::iota(participants.begin(), participants.end(), 0);
    Rng rng(seed * 31 + 1);
    for (std::size_t n = 0; n < R; ++n) shards.push_back(ShardState{n, M, spec.y, 0, {}});
    for (std::size_t s = 0; s < subpackets; ++s) {
      model.push_back(PlainSubpacket::random(field, M, spec.y, K, rng));
      const auto cols = encode_subpacket(model.back(), spec, consts, participants, rng);
      for (std::size_t n = 0; n < R; ++n) shards[n].append(cols[n]);
    }
  }

  std::vector<FieldVector> read(std::size_t theta, Rng& rng, QueryBundle* keep = nullptr) const {
    const auto queries = build_queries(theta, M, spec, consts, participants, rng);
    std::vector<Answer> answers;
    for (std::size_t n = 0; n < spec.R; ++n) answers.push_back(answer_query(shards[n], queries.for_db(n)));
    if (keep) *keep = queries;
    return decode_read(answers, spec, consts, participants);
  }

  FieldVector expected(std::size_t s, std::size_t theta) const {
    FieldVector out;
    for (std::size_t j = 0; j < spec.y; ++j) {
      for (std::size_t l = 0; l < spec.K; ++l) out.push_back(model[s].at(theta, j, l));
    }
    return out;
  }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no pruw::Error thrown";
  return ErrorCode::kInvariantViolation;
}

}  // namespace

TEST(Code, DeriveParameters) {
  EXPECT_EQ(derive_code(1, 4), (CodeSpec{1, 4, 1, 1}));
  EXPECT_EQ(derive_code(2, 11), (CodeSpec{2, 11, 4, 4}));
  EXPECT_EQ(derive_code(3, 11), (CodeSpec{3, 11, 4, 3}));
  EXPECT_EQ(derive_code(3, 12), (CodeSpec{3, 12, 4, 4}));
  EXPECT_EQ(derive_code(1, 5), (CodeSpec{1, 5, 2, 1}));
  EXPECT_EQ(code_of([] { (void)derive_code(1, 3); }), ErrorCode::kInfeasibleCode);
  EXPECT_EQ(code_of([] { (void)derive_code(2, 4); }), ErrorCode::kInfeasibleCode);
  EXPECT_EQ(code_of([] { (void)derive_code(3, 5); }), ErrorCode::kInfeasibleCode);
}

TEST(Code, Admissibility) {
  EXPECT_TRUE(is_admissible_code(2, 5));   // odd gap 3
  EXPECT_TRUE(is_admissible_code(3, 6));
  EXPECT_TRUE(is_admissible_code(1, 5));   // even gap 4
  EXPECT_TRUE(is_admissible_code(2, 6));
  EXPECT_FALSE(is_admissible_code(2, 4));  // gap 2
  EXPECT_FALSE(is_admissible_code(1, 2));
  EXPECT_FALSE(is_admissible_code(0, 4));
}

TEST(Code, FormulasMatchSymbolCounting) {
  for (std::size_t R = 4; R <= 30; ++R) {
    for (std::size_t K = 1; K < R; ++K) {
      if (!is_admissible_code(K, R)) continue;
      const auto spec = derive_code(K, R);
      const auto f = cost_formulas(spec);
      const auto [read, write] = oracle::counted_costs(K, R);
      EXPECT_EQ(f.read, read) << K << "," << R;
      EXPECT_EQ(f.write, write) << K << "," << R;
      const auto t = subpacket_traffic(spec);
      EXPECT_EQ(make_rational(t.downloaded, t.useful), read);
      EXPECT_EQ(make_rational(t.uploaded, t.useful), write);
    }
  }
}

TEST(Protocol, EncoderMatchesOracle) {
  for (auto [K, R] : {std::pair<std::size_t, std::size_t>{1, 4}, {2, 6}, {3, 11}, {2, 11}}) {
    const PrimeField field(kSimulationPrime);
    const auto spec = derive_code(K, R);
    const auto consts = gen_eval_constants(field, R, spec.y, K, 5);
    std::vector<std::size_t> part(R);
    std::iota(part.begin(), part.end(), 0);
    Rng rng(11);
    const auto plain = PlainSubpacket::random(field, 3, spec.y, K, rng);
    const auto noise = draw_storage_noise(field, spec, 3, rng);
    const auto cols = encode_subpacket(plain, spec, consts, part, noise);
    for (std::size_t n = 0; n < R; ++n) {
      const auto expect = oracle::encode_column(raw(plain.w), raw(noise.z), consts.alpha(n).value(),
                                                raw(consts.f_values()), 3, spec.y, K, spec.x, kSimulationPrime);
      EXPECT_EQ(raw(cols[n]), expect);
    }
  }
}

TEST(Protocol, AnswersAndDecodeMatchOracle) {
  Bench s(2, 7, 3, 2, 21);
  Rng rng(4);
  QueryBundle queries;
  const auto got = s.read(1, rng, &queries);
  for (std::size_t n = 0; n < s.spec.R; ++n) {
    const auto ans = answer_query(s.shards[n], queries.for_db(n));
    for (std::size_t sp = 0; sp < 2; ++sp) {
      for (std::size_t l = 0; l < s.spec.K; ++l) {
        EXPECT_EQ(ans.per_subpacket[sp][l].value(),
                  oracle::answer_symbol(raw(s.shards[n].subpacket(sp)), raw(queries.for_db(n).lanes[l]),
                                        kSimulationPrime));
      }
    }
  }
  // Decode lane 0 of subpacket 0 with the oracle solver.
  const std::size_t R = s.spec.R;
  oracle::Mat a(R, std::vector<std::uint64_t>(R));
  std::vector<std::uint64_t> b(R);
  const std::uint64_t q = kSimulationPrime;
  for (std::size_t r = 0; r < R; ++r) {
    const auto alpha = s.consts.alpha(r).value();
    for (std::size_t j = 0; j < s.spec.y; ++j) a[r][j] = oracle::invmod(oracle::submod(s.consts.f(j, 0).value(), alpha, q), q);
    for (std::size_t t = 0; t <= s.spec.K + s.spec.x; ++t) a[r][s.spec.y + t] = oracle::powmod(alpha, t, q);
    b[r] = answer_query(s.shards[r], queries.for_db(r)).per_subpacket[0][0].value();
  }
  const auto sol = oracle::dense_solve(a, b, q);
  ASSERT_TRUE(sol.has_value());
  for (std::size_t j = 0; j < s.spec.y; ++j) {
    EXPECT_EQ((*sol)[j], s.model[0].at(1, j, 0).value());
    EXPECT_EQ(got[0][j * s.spec.K].value(), (*sol)[j]);
  }
}

TEST(Protocol, NullSetGetsNoUpdateAndZeroIncrement) {
  Bench s(1, 6, 2, 1, 8);  // odd gap 5: x=2, y=2, |F|=0
  Bench t(1, 8, 2, 1, 8);  // odd gap 7: x=3, y=3, |F|=0
  Bench u(2, 8, 2, 1, 8);  // even gap 6: x=3, y=2, |F|=1
  for (Bench* p : {&s, &t, &u}) {
    const auto F = default_null_set(p->spec, p->participants);
    EXPECT_EQ(F.size(), p->spec.x - p->spec.y);
    Rng rng(2);
    const auto queries = build_queries(0, p->M, p->spec, p->consts, p->participants, rng);
    const std::vector<FieldVector> delta{p->field.random_vector(p->spec.y * p->spec.K, rng)};
    const auto bundle = build_updates(delta, p->spec, p->consts, p->participants, F, rng);
    EXPECT_EQ(bundle.per_db.size(), p->spec.R - F.size());
    for (std::size_t n : F) {
      EXPECT_EQ(bundle.for_db(n), nullptr);
      const auto inc = incremental_update(p->field.random_vector(p->spec.K, rng), queries.for_db(n), F, p->spec,
                                          p->consts);
      for (const auto& e : inc) EXPECT_TRUE(e.is_zero());
    }
  }
}

TEST(Protocol, BadNullSetRejected) {
  Bench s(2, 8, 2, 1, 3);
  Rng rng(1);
  const std::vector<FieldVector> delta{s.field.zeros(s.spec.y * s.spec.K)};
  const std::vector<std::size_t> empty;
  EXPECT_EQ(code_of([&] { (void)build_updates(delta, s.spec, s.consts, s.participants, empty, rng); }),
            ErrorCode::kBadNullSet);
  const std::vector<std::size_t> outside{42};
  EXPECT_EQ(code_of([&] { (void)build_updates(delta, s.spec, s.consts, s.participants, outside, rng); }),
            ErrorCode::kBadNullSet);
}

TEST(Protocol, ThetaOutOfRange) {
  Bench s(1, 4, 2, 1, 3);
  Rng rng(1);
  EXPECT_EQ(code_of([&] { (void)s.read(2, rng); }), ErrorCode::kBadIndex);
}

// Read-after-write over many codes: the read returns W_theta, the write adds
// delta to W_theta only, and every database's storage keeps the encoded
// form (its offset from a noiseless encoding is a degree-x polynomial in
// alpha), including the databases in F that received nothing.
TEST(ProtocolProperty, ReadAfterWriteRoundtrips) {
  const std::vector<std::pair<std::size_t, std::size_t>> codes{{1, 4}, {1, 6}, {2, 7}, {2, 11}, {3, 12}, {2, 8}};
  std::size_t trials = 0;
  for (std::size_t c = 0; c < codes.size(); ++c) {
    for (std::uint64_t seed = 1; seed <= 34; ++seed) {
      const auto [K, R] = codes[c];
      const std::size_t M = 2 + seed % 3;
      Bench s(K, R, M, 1 + seed % 2, seed * 97 + c);
      Rng rng(seed);
      const std::size_t theta = seed % M;
      QueryBundle queries;
      const auto got = s.read(theta, rng, &queries);
      for (std::size_t sp = 0; sp < s.model.size(); ++sp) ASSERT_EQ(got[sp], s.expected(sp, theta));

      std::vector<FieldVector> delta;
      for (std::size_t sp = 0; sp < s.model.size(); ++sp) delta.push_back(s.field.random_vector(s.spec.y * K, rng));
      const auto F = default_null_set(s.spec, s.participants);
      const auto bundle = build_updates(delta, s.spec, s.consts, s.participants, F, rng);
      for (const auto& up : bundle.per_db) {
        apply_update(s.shards[up.db_index], up, queries.for_db(up.db_index), s.spec, s.consts);
      }
      for (std::size_t sp = 0; sp < s.model.size(); ++sp) {
        for (std::size_t j = 0; j < s.spec.y; ++j) {
          for (std::size_t l = 0; l < K; ++l) s.model[sp].at(theta, j, l) += delta[sp][j * K + l];
        }
      }
      for (std::size_t m = 0; m < M; ++m) {
        const auto again = s.read(m, rng);
        for (std::size_t sp = 0; sp < s.model.size(); ++sp) ASSERT_EQ(again[sp], s.expected(sp, m));
      }

      const auto zero_noise = std::vector<std::uint64_t>(s.spec.y * (s.spec.x + 1) * M, 0);
      std::vector<std::uint64_t> points;
      for (std::size_t n = 0; n < R; ++n) points.push_back(s.consts.alpha(n).value());
      for (std::size_t sp = 0; sp < s.model.size(); ++sp) {
        for (std::size_t idx = 0; idx < s.spec.y * M; ++idx) {
          std::vector<std::uint64_t> offsets;
          for (std::size_t n = 0; n < R; ++n) {
            const auto clean = oracle::encode_column(raw(s.model[sp].w), zero_noise, points[n],
                                                     raw(s.consts.f_values()), M, s.spec.y, K, s.spec.x,
                                                     kSimulationPrime);
            offsets.push_back(oracle::submod(s.shards[n].subpacket(sp)[idx].value(), clean[idx], kSimulationPrime));
          }
          ASSERT_TRUE(oracle::low_degree(points, offsets, s.spec.x, kSimulationPrime));
        }
      }
      ++trials;
    }
  }
  EXPECT_GE(trials, 200u);
}

// Answers are linear in storage and the encoder is linear in (W, Z).
TEST(ProtocolProperty, Linearity) {
  const PrimeField field(kSimulationPrime);
  Rng rng(77);
  for (auto [K, R] : {std::pair<std::size_t, std::size_t>{1, 4}, {2, 7}, {3, 12}}) {
    const auto spec = derive_code(K, R);
    const auto consts = gen_eval_constants(field, R, spec.y, K, 13);
    std::vector<std::size_t> part(R);
    std::iota(part.begin(), part.end(), 0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = PlainSubpacket::random(field, 2, spec.y, K, rng);
      const auto b = PlainSubpacket::random(field, 2, spec.y, K, rng);
      const auto za = draw_storage_noise(field, spec, 2, rng);
      const auto zb = draw_storage_noise(field, spec, 2, rng);
      const auto c = field.random(rng);
      PlainSubpacket ab = a;
      StorageNoise zab = za;
      for (std::size_t i = 0; i < ab.w.size(); ++i) ab.w[i] += c * b.w[i];
      for (std::size_t i = 0; i < zab.z.size(); ++i) zab.z[i] += c * zb.z[i];
      const auto ea = encode_subpacket(a, spec, consts, part, za);
      const auto eb = encode_subpacket(b, spec, consts, part, zb);
      const auto eab = encode_subpacket(ab, spec, consts, part, zab);
      const auto queries = build_queries(1, 2, spec, consts, part, rng);
      for (std::size_t n = 0; n < R; ++n) {
        for (std::size_t i = 0; i < eab[n].size(); ++i) ASSERT_EQ(eab[n][i], ea[n][i] + c * eb[n][i]);
        ShardState sa{n, 2, spec.y, 0, {}}, sb = sa, sab = sa;
        sa.append(ea[n]);
        sb.append(eb[n]);
        sab.append(eab[n]);
        const auto qa = answer_query(sa, queries.for_db(n));
        const auto qb = answer_query(sb, queries.for_db(n));
        const auto qab = answer_query(sab, queries.for_db(n));
        for (std::size_t l = 0; l < K; ++l) {
          ASSERT_EQ(qab.per_subpacket[0][l], qa.per_subpacket[0][l] + c * qb.per_subpacket[0][l]);
        }
      }
    }
  }
}

TEST(Protocol, DecodingMatrixInvertibleAcrossSeeds) {
  const PrimeField field(kSimulationPrime);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    for (auto [K, R] : {std::pair<std::size_t, std::size_t>{1, 4}, {3, 12}, {4, 9}}) {
      const auto spec = derive_code(K, R);
      const auto consts = gen_eval_constants(field, R, spec.y, K, seed);
      std::vector<std::size_t> part(R);
      std::iota(part.begin(), part.end(), 0);
      for (std::size_t l = 0; l < K; ++l) {
        const auto m = decoding_matrix(spec, consts, part, l);
        oracle::Mat a(R, std::vector<std::uint64_t>(R));
        for (std::size_t r = 0; r < R; ++r) {
          for (std::size_t c = 0; c < R; ++c) a[r][c] = m(r, c).value();
        }
        EXPECT_TRUE(oracle::dense_solve(a, std::vector<std::uint64_t>(R, 1), kSimulationPrime).has_value());
      }
    }
  }
}
