#include "pruw/protocol.hpp"

#include <algorithm>
#include <string>

#include "pruw/error.hpp"

namespace pruw {

namespace {

std::string code_name(std::size_t K, std::size_t R) {
  return "(K=" + std::to_string(K) + ", R=" + std::to_string(R) + ")";
}

void check_participants(const CodeSpec& spec, const EvalConstants& consts,
                        std::span<const std::size_t> participants) {
  if (participants.size() != spec.R) {
    throw Error(ErrorCode::kDimensionMismatch, "expected R=" + std::to_string(spec.R) +
                                                   " participants, got " +
                                                   std::to_string(participants.size()));
  }
  if (consts.y() != spec.y || consts.K() != spec.K) {
    throw Error(ErrorCode::kDimensionMismatch, "evaluation constants do not match the code");
  }
  for (std::size_t a = 0; a < participants.size(); ++a) {
    if (participants[a] >= consts.num_databases()) {
      throw Error(ErrorCode::kBadIndex, "participant out of range");
    }
    for (std::size_t b = a + 1; b < participants.size(); ++b) {
      if (participants[a] == participants[b]) {
        throw Error(ErrorCode::kInvalidInput, "participants must be distinct");
      }
    }
  }
}

bool contains(std::span<const std::size_t> set, std::size_t v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

// prod_{i != skip} (f_{j,i} - point) over i in [0, K).
FieldElement row_product(const EvalConstants& consts, std::size_t j, const FieldElement& point,
                         std::size_t skip) {
  FieldElement acc = point.pow(0);
  for (std::size_t i = 0; i < consts.K(); ++i) {
    if (i != skip) acc *= consts.f(j, i) - point;
  }
  return acc;
}

// prod_{i != skip} (f_{i,l} - point) over i in [0, y).
FieldElement column_product(const EvalConstants& consts, std::size_t l, const FieldElement& point,
                            std::size_t skip) {
  FieldElement acc = point.pow(0);
  for (std::size_t i = 0; i < consts.y(); ++i) {
    if (i != skip) acc *= consts.f(i, l) - point;
  }
  return acc;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

}  // namespace

bool is_admissible_code(std::size_t K, std::size_t R) {
  if (K < 1 || R < K + 3) return false;
  const std::size_t gap = R - K;
  return gap % 2 == 1 ? gap >= 3 : gap >= 4;
}

CodeSpec derive_code(std::size_t K, std::size_t R) {
  if (!is_admissible_code(K, R)) {
    throw Error(ErrorCode::kInfeasibleCode, code_name(K, R) +
                                                " needs 1 <= K <= R-3 (odd R-K) or K <= R-4 (even R-K)");
  }
  const std::size_t gap = R - K;
  CodeSpec spec;
  spec.K = K;
  spec.R = R;
  spec.x = gap % 2 == 1 ? (gap - 1) / 2 : gap / 2;
  spec.y = R - K - spec.x - 1;
  return spec;
}

CostFormulas cost_formulas(const CodeSpec& spec) {
  const auto R = static_cast<std::int64_t>(spec.R);
  const auto K = static_cast<std::int64_t>(spec.K);
  const auto x = static_cast<std::int64_t>(spec.x);
  CostFormulas out;
  out.read = make_rational(R, R - K - x - 1);
  out.write = make_rational(2 * R - 2 * x - K - 1, R - x - K - 1);
  out.total = out.read + out.write;
  return out;
}

PlainSubpacket PlainSubpacket::zeros(const PrimeField& field, std::size_t M, std::size_t y,
                                     std::size_t K) {
  return PlainSubpacket{M, y, K, field.zeros(M * y * K)};
}

PlainSubpacket PlainSubpacket::random(const PrimeField& field, std::size_t M, std::size_t y,
                                      std::size_t K, Rng& rng) {
  return PlainSubpacket{M, y, K, field.random_vector(M * y * K, rng)};
}

StorageNoise draw_storage_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M,
                                Rng& rng) {
  return StorageNoise{M, spec.y, spec.x, field.random_vector(spec.y * (spec.x + 1) * M, rng)};
}

StorageNoise zero_storage_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M) {
  return StorageNoise{M, spec.y, spec.x, field.zeros(spec.y * (spec.x + 1) * M)};
}

std::vector<ShardColumn> encode_subpacket(const PlainSubpacket& plain, const CodeSpec& spec,
                                          const EvalConstants& consts,
                                          std::span<const std::size_t> participants,
                                          const StorageNoise& noise) {
  check_participants(spec, consts, participants);
  const std::size_t M = plain.M;
  if (plain.y != spec.y || plain.K != spec.K || plain.w.size() != M * spec.y * spec.K ||
      noise.M != M || noise.y != spec.y || noise.x != spec.x) {
    throw Error(ErrorCode::kDimensionMismatch, "subpacket or noise shape does not match the code");
  }
  std::vector<ShardColumn> columns;
  columns.reserve(participants.size());
  for (std::size_t n : participants) {
    const FieldElement& alpha = consts.alpha(n);
    ShardColumn column(spec.y * M, alpha - alpha);
    for (std::size_t j = 0; j < spec.y; ++j) {
      FieldVector weights;
      for (std::size_t i = 0; i < spec.K; ++i) weights.push_back((consts.f(j, i) - alpha).inverse());
      for (std::size_t m = 0; m < M; ++m) {
        FieldElement v = alpha - alpha;
        for (std::size_t i = 0; i < spec.K; ++i) v += weights[i] * plain.at(m, j, i);
        FieldElement power = alpha.pow(0);
        for (std::size_t t = 0; t <= spec.x; ++t) {
          v += power * noise.at(j, t, m);
          power *= alpha;
        }
        column[j * M + m] = v;
      }
    }
    columns.push_back(std::move(column));
  }
  return columns;
}

std::vector<ShardColumn> encode_subpacket(const PlainSubpacket& plain, const CodeSpec& spec,
                                          const EvalConstants& consts,
                                          std::span<const std::size_t> participants, Rng& rng) {
  const PrimeField field(consts.alpha(0).modulus());
  return encode_subpacket(plain, spec, consts, participants,
                          draw_storage_noise(field, spec, plain.M, rng));
}

void ShardState::append(const ShardColumn& column) {
  if (column.size() != y * M) {
    throw Error(ErrorCode::kDimensionMismatch, "shard column has the wrong length");
  }
  symbols.insert(symbols.end(), column.begin(), column.end());
  ++subpackets;
}

QueryNoise draw_query_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M, Rng& rng) {
  return QueryNoise{M, spec.y, spec.K, field.random_vector(spec.y * spec.K * M, rng)};
}

QueryNoise zero_query_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M) {
  return QueryNoise{M, spec.y, spec.K, field.zeros(spec.y * spec.K * M)};
}

const ServerQuery& QueryBundle::for_db(std::size_t db_index) const {
  for (const auto& q : per_db) {
    if (q.db_index == db_index) return q;
  }
  throw Error(ErrorCode::kBadIndex, "no query for database " + std::to_string(db_index));
}

QueryBundle build_queries(std::size_t theta, std::size_t M, const CodeSpec& spec,
                          const EvalConstants& consts, std::span<const std::size_t> participants,
                          const QueryNoise& noise) {
  check_participants(spec, consts, participants);
  if (theta >= M) {
    throw Error(ErrorCode::kBadIndex,
                "submodel index " + std::to_string(theta) + " outside [0, " + std::to_string(M) + ")");
  }
  if (noise.M != M || noise.y != spec.y || noise.K != spec.K) {
    throw Error(ErrorCode::kDimensionMismatch, "query noise shape does not match the code");
  }
  QueryBundle bundle;
  bundle.theta = theta;
  for (std::size_t n : participants) {
    const FieldElement& alpha = consts.alpha(n);
    ServerQuery query{n, M, spec.y, {}};
    for (std::size_t l = 0; l < spec.K; ++l) {
      FieldVector lane(spec.y * M, alpha - alpha);
      for (std::size_t j = 0; j < spec.y; ++j) {
        const FieldElement selector =
            row_product(consts, j, alpha, l) / row_product(consts, j, consts.f(j, l), l);
        const FieldElement scale = row_product(consts, j, alpha, kNone);
        for (std::size_t m = 0; m < M; ++m) {
          FieldElement v = scale * noise.at(j, l, m);
          if (m == theta) v += selector;
          lane[j * M + m] = v;
        }
      }
      query.lanes.push_back(std::move(lane));
    }
    bundle.per_db.push_back(std::move(query));
  }
  return bundle;
}

QueryBundle build_queries(std::size_t theta, std::size_t M, const CodeSpec& spec,
                          const EvalConstants& consts, std::span<const std::size_t> participants,
                          Rng& rng) {
  const PrimeField field(consts.alpha(0).modulus());
  return build_queries(theta, M, spec, consts, participants, draw_query_noise(field, spec, M, rng));
}

Answer answer_query(const ShardState& shard, const ServerQuery& query) {
  if (query.db_index != shard.db_index || query.M != shard.M || query.y != shard.y) {
    throw Error(ErrorCode::kDimensionMismatch, "query does not belong to this shard");
  }
  Answer answer{shard.db_index, {}};
  answer.per_subpacket.reserve(shard.subpackets);
  for (std::size_t s = 0; s < shard.subpackets; ++s) {
    const auto column = shard.subpacket(s);
    FieldVector out;
    out.reserve(query.lanes.size());
    for (const auto& lane : query.lanes) {
      if (lane.size() != column.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "query lane length != shard column length");
      }
      FieldElement acc = column[0] - column[0];
      for (std::size_t idx = 0; idx < column.size(); ++idx) acc += column[idx] * lane[idx];
      out.push_back(acc);
    }
    answer.per_subpacket.push_back(std::move(out));
  }
  return answer;
}

FieldMatrix decoding_matrix(const CodeSpec& spec, const EvalConstants& consts,
                            std::span<const std::size_t> participants, std::size_t lane) {
  const FieldElement zero = consts.alpha(0) - consts.alpha(0);
  FieldMatrix a(spec.R, spec.R, zero);
  for (std::size_t r = 0; r < participants.size(); ++r) {
    const FieldElement& alpha = consts.alpha(participants[r]);
    for (std::size_t j = 0; j < spec.y; ++j) a(r, j) = (consts.f(j, lane) - alpha).inverse();
    FieldElement power = alpha.pow(0);
    for (std::size_t t = 0; t <= spec.K + spec.x; ++t) {
      a(r, spec.y + t) = power;
      power *= alpha;
    }
  }
  return a;
}

std::vector<FieldVector> decode_read(std::span<const Answer> answers, const CodeSpec& spec,
                                     const EvalConstants& consts,
                                     std::span<const std::size_t> participants) {
  check_participants(spec, consts, participants);
  if (answers.size() != spec.R) {
    throw Error(ErrorCode::kDimensionMismatch, "decoding needs exactly R answers");
  }
  const std::size_t subpackets = answers.front().per_subpacket.size();
  for (std::size_t r = 0; r < answers.size(); ++r) {
    if (answers[r].db_index != participants[r] || answers[r].per_subpacket.size() != subpackets) {
      throw Error(ErrorCode::kDimensionMismatch, "answers must follow participant order");
    }
    for (const auto& lanes : answers[r].per_subpacket) {
      if (lanes.size() != spec.K) {
        throw Error(ErrorCode::kDimensionMismatch, "each answer carries K symbols per subpacket");
      }
    }
  }
  const FieldElement zero = consts.alpha(0) - consts.alpha(0);
  std::vector<FieldVector> out(subpackets, FieldVector(spec.y * spec.K, zero));
  for (std::size_t l = 0; l < spec.K; ++l) {
    std::vector<FieldVector> rhs(subpackets, FieldVector(spec.R, zero));
    for (std::size_t s = 0; s < subpackets; ++s) {
      for (std::size_t r = 0; r < spec.R; ++r) rhs[s][r] = answers[r].per_subpacket[s][l];
    }
    // The noise coefficients v_0..v_{K+x} in the tail are discarded.
    const auto solved = solve_columns(decoding_matrix(spec, consts, participants, l), std::move(rhs));
    for (std::size_t s = 0; s < subpackets; ++s) {
      for (std::size_t j = 0; j < spec.y; ++j) out[s][j * spec.K + l] = solved[s][j];
    }
  }
  return out;
}

std::vector<std::size_t> default_null_set(const CodeSpec& spec,
                                          std::span<const std::size_t> participants) {
  std::vector<std::size_t> sorted(participants.begin(), participants.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.resize(spec.null_set_size());
  return sorted;
}

const ServerUpdate* UpdateBundle::for_db(std::size_t db_index) const {
  for (const auto& u : per_db) {
    if (u.db_index == db_index) return &u;
  }
  return nullptr;
}

UpdateNoise draw_update_noise(const PrimeField& field, const CodeSpec& spec, std::size_t subpackets,
                              Rng& rng) {
  UpdateNoise noise;
  noise.reserve(subpackets);
  for (std::size_t s = 0; s < subpackets; ++s) noise.push_back(field.random_vector(spec.K, rng));
  return noise;
}

UpdateBundle build_updates(std::span<const FieldVector> delta, const CodeSpec& spec,
                           const EvalConstants& consts, std::span<const std::size_t> participants,
                           std::span<const std::size_t> null_set, const UpdateNoise& noise) {
  check_participants(spec, consts, participants);
  if (null_set.size() != spec.null_set_size()) {
    throw Error(ErrorCode::kBadNullSet, "null set must contain x-y=" +
                                            std::to_string(spec.null_set_size()) + " databases");
  }
  for (std::size_t n : null_set) {
    if (!contains(participants, n)) throw Error(ErrorCode::kBadNullSet, "null set outside participants");
  }
  if (noise.size() != delta.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one noise vector per subpacket is required");
  }
  for (std::size_t s = 0; s < delta.size(); ++s) {
    if (delta[s].size() != spec.y * spec.K || noise[s].size() != spec.K) {
      throw Error(ErrorCode::kDimensionMismatch, "update shape does not match the code");
    }
  }

  // Delta~_{j}^{[l]} is shared by every database; precompute it per subpacket.
  std::vector<FieldVector> scaled(delta.begin(), delta.end());
  for (std::size_t l = 0; l < spec.K; ++l) {
    for (std::size_t j = 0; j < spec.y; ++j) {
      const FieldElement factor = row_product(consts, j, consts.f(j, l), l) /
                                  column_product(consts, l, consts.f(j, l), j);
      for (auto& sub : scaled) sub[j * spec.K + l] *= factor;
    }
  }

  UpdateBundle bundle;
  bundle.null_set.assign(null_set.begin(), null_set.end());
  for (std::size_t n : participants) {
    if (contains(null_set, n)) continue;
    const FieldElement& alpha = consts.alpha(n);
    ServerUpdate update{n, bundle.null_set, {}};
    for (std::size_t s = 0; s < scaled.size(); ++s) {
      FieldVector lanes;
      for (std::size_t l = 0; l < spec.K; ++l) {
        FieldElement u = column_product(consts, l, alpha, kNone) * noise[s][l];
        for (std::size_t j = 0; j < spec.y; ++j) {
          u += column_product(consts, l, alpha, j) * scaled[s][j * spec.K + l];
        }
        lanes.push_back(u);
      }
      update.per_subpacket.push_back(std::move(lanes));
    }
    bundle.per_db.push_back(std::move(update));
  }
  return bundle;
}

UpdateBundle build_updates(std::span<const FieldVector> delta, const CodeSpec& spec,
                           const EvalConstants& consts, std::span<const std::size_t> participants,
                           std::span<const std::size_t> null_set, Rng& rng) {
  const PrimeField field(consts.alpha(0).modulus());
  return build_updates(delta, spec, consts, participants, null_set,
                       draw_update_noise(field, spec, delta.size(), rng));
}

ShardColumn incremental_update(const FieldVector& combined_updates, const ServerQuery& query,
                               std::span<const std::size_t> null_set, const CodeSpec& spec,
                               const EvalConstants& consts) {
  if (combined_updates.size() != spec.K || query.lanes.size() != spec.K) {
    throw Error(ErrorCode::kDimensionMismatch, "expected K combined updates and K query lanes");
  }
  const std::size_t M = query.M;
  const FieldElement& alpha = consts.alpha(query.db_index);
  ShardColumn out(spec.y * M, alpha - alpha);
  for (std::size_t l = 0; l < spec.K; ++l) {
    for (std::size_t j = 0; j < spec.y; ++j) {
      FieldElement shaper_num = alpha.pow(0);
      FieldElement shaper_den = alpha.pow(0);
      for (std::size_t r : null_set) {
        shaper_num *= consts.alpha(r) - alpha;
        shaper_den *= consts.alpha(r) - consts.f(j, l);
      }
      const FieldElement scaling = row_product(consts, j, alpha, kNone).inverse();
      const FieldElement factor = shaper_num / shaper_den * combined_updates[l] * scaling;
      for (std::size_t m = 0; m < M; ++m) out[j * M + m] += factor * query.lanes[l][j * M + m];
    }
  }
  return out;
}

void apply_update(ShardState& shard, const ServerUpdate& update, const ServerQuery& query,
                  const CodeSpec& spec, const EvalConstants& consts) {
  if (update.db_index != shard.db_index || query.db_index != shard.db_index) {
    throw Error(ErrorCode::kDimensionMismatch, "update does not belong to this shard");
  }
  if (update.per_subpacket.size() != shard.subpackets) {
    throw Error(ErrorCode::kDimensionMismatch, "one combined update per subpacket is required");
  }
  for (std::size_t s = 0; s < shard.subpackets; ++s) {
    const ShardColumn inc = incremental_update(update.per_subpacket[s], query, update.null_set, spec, consts);
    auto column = shard.subpacket(s);
    for (std::size_t idx = 0; idx < column.size(); ++idx) column[idx] += inc[idx];
  }
}

SubpacketTraffic subpacket_traffic(const CodeSpec& spec) {
  return SubpacketTraffic{spec.R * spec.K, spec.K * (spec.R - spec.null_set_size()), spec.y * spec.K};
}

}  // namespace pruw
