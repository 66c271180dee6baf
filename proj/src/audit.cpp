#include "pruw/audit.hpp"

#include <numeric>

#include "pruw/error.hpp"

namespace pruw {

namespace {

// Enumerates every vector of F_q^len in lexicographic order.
bool next_vector(FieldVector& v, const PrimeField& field) {
  for (auto& e : v) {
    if (e.value() + 1 < field.modulus()) {
      e = field.element(e.value() + 1);
      return true;
    }
    e = field.zero();
  }
  return false;
}

std::uint64_t pow_u64(std::uint64_t b, std::size_t e) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < e; ++i) out *= b;
  return out;
}

std::size_t key_of(std::span<const FieldElement> values, std::uint64_t q) {
  std::size_t key = 0;
  for (auto it = values.rbegin(); it != values.rend(); ++it) key = key * q + it->value();
  return key;
}

constexpr std::size_t kMaxPoints = 1u << 26;

void check_size(std::uint64_t points) {
  if (points > kMaxPoints) {
    throw Error(ErrorCode::kInvalidInput, "enumeration space too large; lower q or M");
  }
}

// Histogram of Q_{n,l} over every value of lane l's query noise.
std::vector<std::uint64_t> query_histogram(const PrimeField& field, const CodeSpec& spec,
                                           const EvalConstants& consts,
                                           const std::vector<std::size_t>& participants, std::size_t M,
                                           std::size_t theta, std::size_t db, std::size_t lane,
                                           bool no_noise, std::uint64_t& points) {
  const std::size_t width = spec.y * M;
  check_size(pow_u64(field.modulus(), width));
  std::vector<std::uint64_t> hist(pow_u64(field.modulus(), width), 0);
  QueryNoise noise = zero_query_noise(field, spec, M);
  FieldVector lane_noise(width, field.zero());
  points = 0;
  do {
    if (!no_noise) {
      for (std::size_t j = 0; j < spec.y; ++j) {
        for (std::size_t m = 0; m < M; ++m) noise.at(j, lane, m) = lane_noise[j * M + m];
      }
    }
    const auto bundle = build_queries(theta, M, spec, consts, participants, noise);
    ++hist[key_of(bundle.for_db(db).lanes[lane], field.modulus())];
    ++points;
  } while (next_vector(lane_noise, field));
  return hist;
}

// Histogram of U_{n,l} over every value of zhat_l, one subpacket.
std::vector<std::uint64_t> update_histogram(const PrimeField& field, const CodeSpec& spec,
                                            const EvalConstants& consts,
                                            const std::vector<std::size_t>& participants,
                                            const std::vector<std::size_t>& null_set, const FieldVector& delta,
                                            std::size_t db, std::size_t lane, bool no_noise,
                                            std::uint64_t& points) {
  std::vector<std::uint64_t> hist(field.modulus(), 0);
  UpdateNoise noise{field.zeros(spec.K)};
  const std::vector<FieldVector> deltas{delta};
  points = 0;
  for (std::uint64_t z = 0; z < field.modulus(); ++z) {
    noise[0][lane] = no_noise ? field.zero() : field.element(z);
    const auto bundle = build_updates(deltas, spec, consts, participants, null_set, noise);
    ++hist[bundle.for_db(db)->per_subpacket[0][lane].value()];
    ++points;
  }
  return hist;
}

// Histogram of database db's shard column over every value of Z_{j,0}.
std::vector<std::uint64_t> storage_histogram(const PrimeField& field, const CodeSpec& spec,
                                             const EvalConstants& consts,
                                             const std::vector<std::size_t>& participants,
                                             const PlainSubpacket& plain, const StorageNoise& fixed,
                                             std::size_t db_pos, bool no_noise, std::uint64_t& points) {
  const std::size_t M = plain.M;
  const std::size_t width = spec.y * M;
  check_size(pow_u64(field.modulus(), width));
  std::vector<std::uint64_t> hist(pow_u64(field.modulus(), width), 0);
  StorageNoise noise = no_noise ? zero_storage_noise(field, spec, M) : fixed;
  FieldVector z0(width, field.zero());
  points = 0;
  do {
    if (!no_noise) {
      for (std::size_t j = 0; j < spec.y; ++j) {
        for (std::size_t m = 0; m < M; ++m) noise.at(j, 0, m) = z0[j * M + m];
      }
    }
    const auto columns = encode_subpacket(plain, spec, consts, participants, noise);
    ++hist[key_of(columns[db_pos], field.modulus())];
    ++points;
  } while (next_vector(z0, field));
  return hist;
}

}  // namespace

Rational tv_distance(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "histograms differ in support size");
  const std::uint64_t ta = std::accumulate(a.begin(), a.end(), std::uint64_t{0});
  const std::uint64_t tb = std::accumulate(b.begin(), b.end(), std::uint64_t{0});
  if (ta == 0 || ta != tb) throw Error(ErrorCode::kDimensionMismatch, "histograms differ in mass");
  BigInt diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return Rational(diff, BigInt(2 * ta));
}

AuditReport audit_privacy(std::uint64_t q, std::size_t M, bool negative_control, std::uint64_t seed) {
  const PrimeField field(q);
  if (M < 2) throw Error(ErrorCode::kInvalidInput, "need M >= 2 to compare two submodel indices");
  AuditReport rep;
  rep.q = q;
  rep.M = M;
  rep.negative_control = negative_control;
  rep.max_tv = 0;
  Rng rng(seed);

  for (const auto& [K, R] : {std::pair<std::size_t, std::size_t>{1, 4}, {2, 6}}) {
    const CodeSpec spec = derive_code(K, R);
    const EvalConstants consts = gen_eval_constants(field, R, spec.y, K, seed + K);
    std::vector<std::size_t> participants(R);
    std::iota(participants.begin(), participants.end(), 0);
    const auto null_set = default_null_set(spec, participants);
    auto record = [&](AuditCase c) {
      if (c.tv > rep.max_tv) rep.max_tv = c.tv;
      rep.cases.push_back(std::move(c));
    };

    // Reading: theta = 0 against theta = 1 at every database and lane.
    for (std::size_t db = 0; db < R; ++db) {
      for (std::size_t lane = 0; lane < K; ++lane) {
        std::uint64_t points = 0;
        const auto h0 = query_histogram(field, spec, consts, participants, M, 0, db, lane, negative_control, points);
        const auto h1 = query_histogram(field, spec, consts, participants, M, 1, db, lane, negative_control, points);
        record(AuditCase{"query", "Q(theta=1) vs Q(theta=2)", spec, db, lane, points, tv_distance(h0, h1)});
      }
    }

    // Writing: two different increments at every database outside F.
    const FieldVector delta_a = field.zeros(spec.y * K);
    FieldVector delta_b = field.random_vector(spec.y * K, rng);
    delta_b[0] += field.one();  // never equal to delta_a in the first slot
    for (std::size_t db : participants) {
      if (std::find(null_set.begin(), null_set.end(), db) != null_set.end()) continue;
      for (std::size_t lane = 0; lane < K; ++lane) {
        std::uint64_t points = 0;
        const auto ha = update_histogram(field, spec, consts, participants, null_set, delta_a, db, lane,
                                         negative_control, points);
        const auto hb = update_histogram(field, spec, consts, participants, null_set, delta_b, db, lane,
                                         negative_control, points);
        record(AuditCase{"update", "U(delta=0) vs U(delta random)", spec, db, lane, points, tv_distance(ha, hb)});
      }
    }

    // Storage: two different models, the other noise terms held fixed.
    const PlainSubpacket w_a = PlainSubpacket::zeros(field, M, spec.y, K);
    PlainSubpacket w_b = PlainSubpacket::random(field, M, spec.y, K, rng);
    w_b.w[0] += field.one();
    const StorageNoise fixed = draw_storage_noise(field, spec, M, rng);
    for (std::size_t pos = 0; pos < R; ++pos) {
      std::uint64_t points = 0;
      const auto ha = storage_histogram(field, spec, consts, participants, w_a, fixed, pos, negative_control, points);
      const auto hb = storage_histogram(field, spec, consts, participants, w_b, fixed, pos, negative_control, points);
      record(AuditCase{"storage", "S(W=0) vs S(W random)", spec, participants[pos], 0, points, tv_distance(ha, hb)});
    }
  }
  return rep;
}

}  // namespace pruw
