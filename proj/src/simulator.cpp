#include "pruw/simulator.hpp"

#include <cstdio>
#include <ostream>

#include "pruw/error.hpp"

namespace pruw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string theta_hash(const SystemState& sys, std::size_t theta) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(splitmix64(sys.salt ^ splitmix64(splitmix64(theta) + sys.round))));
  return buf;
}

void check_theta(const SystemState& sys, std::size_t theta) {
  if (theta >= sys.M) {
    throw Error(ErrorCode::kBadIndex,
                "submodel index " + std::to_string(theta) + " outside [0, " + std::to_string(sys.M) + ")");
  }
}

std::vector<QueryBundle> make_queries(SystemState& sys, std::size_t theta) {
  std::vector<QueryBundle> out;
  out.reserve(sys.instances.size());
  for (const auto& inst : sys.instances) {
    out.push_back(build_queries(theta, sys.M, inst.code, sys.consts[inst.segment], inst.participants, sys.rng));
  }
  return out;
}

ReadResult read_with(SystemState& sys, const std::vector<QueryBundle>& queries, Transcript* transcript) {
  ReadResult res;
  res.submodel.assign(sys.L, sys.field.zero());
  const std::uint64_t q = sys.field.modulus();
  for (std::size_t id = 0; id < sys.instances.size(); ++id) {
    const auto& inst = sys.instances[id];
    CostLedger seg;
    std::vector<Answer> answers;
    for (std::size_t n : inst.participants) {
      const auto& query = queries[id].for_db(n);
      if (transcript && transcript->frames) write_frame(*transcript->frames, query_frame(query, q, inst.code));
      answers.push_back(sys.databases[n].answer(id, query));
      if (transcript && transcript->frames) {
        write_frame(*transcript->frames, answer_frame(answers.back(), q, sys.M, inst.code));
      }
      for (const auto& lanes : answers.back().per_subpacket) seg.downloaded += lanes.size();
    }
    const auto decoded = decode_read(answers, inst.code, sys.consts[inst.segment], inst.participants);
    const std::size_t width = inst.code.params_per_subpacket();
    for (std::size_t s = 0; s < decoded.size(); ++s) {
      for (std::size_t idx = 0; idx < width; ++idx) res.submodel[inst.offset + s * width + idx] = decoded[s][idx];
    }
    seg.useful_read += decoded.size() * width;
    sys.segment_ledger[inst.segment] += seg;
    res.ledger += seg;
  }
  sys.ledger += res.ledger;
  return res;
}

CostLedger write_with(SystemState& sys, const std::vector<QueryBundle>& queries, std::size_t theta,
                      const FieldVector& delta, Transcript* transcript) {
  if (delta.size() != sys.L) throw Error(ErrorCode::kDimensionMismatch, "delta must hold L values");
  CostLedger total;
  const std::uint64_t q = sys.field.modulus();
  for (std::size_t id = 0; id < sys.instances.size(); ++id) {
    const auto& inst = sys.instances[id];
    const std::size_t width = inst.code.params_per_subpacket();
    std::vector<FieldVector> parts;
    for (std::size_t s = 0; s < inst.subpackets; ++s) {
      const auto first = delta.begin() + static_cast<std::ptrdiff_t>(inst.offset + s * width);
      parts.emplace_back(first, first + static_cast<std::ptrdiff_t>(width));
    }
    const auto bundle = build_updates(parts, inst.code, sys.consts[inst.segment], inst.participants,
                                      inst.null_set, sys.rng);
    CostLedger seg;
    for (const auto& update : bundle.per_db) {
      if (transcript && transcript->frames) {
        write_frame(*transcript->frames, update_frame(update, q, sys.M, inst.code));
      }
      sys.databases[update.db_index].apply(id, update, queries[id].for_db(update.db_index), inst.code,
                                           sys.consts[inst.segment]);
      for (const auto& lanes : update.per_subpacket) seg.uploaded += lanes.size();
    }
    seg.useful_write += inst.subpackets * width;
    sys.segment_ledger[inst.segment] += seg;
    total += seg;
  }
  for (std::size_t i = 0; i < sys.L; ++i) sys.model[theta][i] += delta[i];
  sys.ledger += total;
  return total;
}

}  // namespace

CostLedger& CostLedger::operator+=(const CostLedger& rhs) {
  downloaded += rhs.downloaded;
  uploaded += rhs.uploaded;
  useful_read += rhs.useful_read;
  useful_write += rhs.useful_write;
  return *this;
}

Rational CostLedger::read_cost() const {
  if (useful_read == 0) return 0;
  return Rational(BigInt(downloaded), BigInt(useful_read));
}

Rational CostLedger::write_cost() const {
  if (useful_write == 0) return 0;
  return Rational(BigInt(uploaded), BigInt(useful_write));
}

void Database::store(std::size_t instance, ShardState shard) { shards_[instance] = std::move(shard); }

const ShardState& Database::shard(std::size_t instance) const {
  const auto it = shards_.find(instance);
  if (it == shards_.end()) throw Error(ErrorCode::kBadIndex, "database holds no shard for this instance");
  return it->second;
}

std::size_t Database::symbol_count() const {
  std::size_t total = 0;
  for (const auto& [id, shard] : shards_) total += shard.size();
  return total;
}

Answer Database::answer(std::size_t instance, const ServerQuery& query) const {
  return answer_query(shard(instance), query);
}

void Database::apply(std::size_t instance, const ServerUpdate& update, const ServerQuery& query,
                     const CodeSpec& spec, const EvalConstants& consts) {
  const auto it = shards_.find(instance);
  if (it == shards_.end()) throw Error(ErrorCode::kBadIndex, "database holds no shard for this instance");
  apply_update(it->second, update, query, spec, consts);
}

BigInt minimal_L(const StoragePlan& plan) {
  BigInt out = 1;
  for (const auto& seg : plan.segments) {
    const auto width = static_cast<std::int64_t>(seg.code.params_per_subpacket());
    for (const auto& e : seg.partition) {
      out = lcm(out, boost::multiprecision::denominator(Rational(e.eta * seg.fraction / width)));
    }
  }
  return out;
}

SystemState init_system(const StoragePlan& plan, std::size_t M, std::size_t L, std::uint64_t seed,
                        std::uint64_t q) {
  if (M < 2) throw Error(ErrorCode::kInvalidInput, "need M >= 2 submodels");
  validate_plan(plan);
  const BigInt min_l = minimal_L(plan);
  if (L == 0 || BigInt(L) % min_l != 0) {
    throw Error(ErrorCode::kIndivisibleL,
                "L=" + std::to_string(L) + " is not a multiple of the minimal L=" + min_l.str());
  }
  SystemState sys;
  sys.plan = plan;
  sys.field = PrimeField(q);
  sys.M = M;
  sys.L = L;
  sys.rng.seed(seed);
  sys.salt = sys.rng();
  sys.segment_ledger.assign(plan.segments.size(), CostLedger{});
  for (std::size_t n = 0; n < plan.N; ++n) sys.databases.emplace_back(n);
  sys.model.reserve(M);
  for (std::size_t m = 0; m < M; ++m) sys.model.push_back(sys.field.random_vector(L, sys.rng));

  std::size_t offset = 0;
  for (std::size_t g = 0; g < plan.segments.size(); ++g) {
    const auto& seg = plan.segments[g];
    sys.consts.push_back(gen_eval_constants(sys.field, plan.N, seg.code.y, seg.code.K, seg.seed));
    const std::size_t width = seg.code.params_per_subpacket();
    for (std::size_t e = 0; e < seg.partition.size(); ++e) {
      const auto& entry = seg.partition[e];
      Instance inst;
      inst.segment = g;
      inst.entry = e;
      inst.code = seg.code;
      inst.participants = entry.subset;
      inst.null_set = default_null_set(seg.code, inst.participants);
      inst.subpackets = static_cast<std::size_t>(to_int64(entry.eta * seg.fraction * L / width));
      inst.offset = offset;
      offset += inst.subpackets * width;

      const std::size_t id = sys.instances.size();
      std::vector<ShardState> shards;
      for (std::size_t n : inst.participants) shards.push_back(ShardState{n, M, seg.code.y, 0, {}});
      for (std::size_t s = 0; s < inst.subpackets; ++s) {
        PlainSubpacket plain = PlainSubpacket::zeros(sys.field, M, seg.code.y, seg.code.K);
        for (std::size_t m = 0; m < M; ++m) {
          for (std::size_t j = 0; j < seg.code.y; ++j) {
            for (std::size_t i = 0; i < seg.code.K; ++i) {
              plain.at(m, j, i) = sys.model[m][inst.offset + s * width + j * seg.code.K + i];
            }
          }
        }
        const auto columns = encode_subpacket(plain, seg.code, sys.consts[g], inst.participants, sys.rng);
        for (std::size_t r = 0; r < columns.size(); ++r) shards[r].append(columns[r]);
      }
      for (std::size_t r = 0; r < shards.size(); ++r) {
        sys.databases[inst.participants[r]].store(id, std::move(shards[r]));
      }
      sys.instances.push_back(std::move(inst));
    }
  }
  if (offset != L) throw Error(ErrorCode::kInvariantViolation, "segments do not cover L parameters");
  const auto bad = occupancy_violations(sys);
  if (!bad.empty()) throw Error(ErrorCode::kInvariantViolation, bad.front());
  return sys;
}

std::vector<std::string> occupancy_violations(const SystemState& sys) {
  std::vector<std::string> out;
  for (std::size_t n = 0; n < sys.databases.size(); ++n) {
    const Rational expected = sys.plan.constraints[n] * sys.M * sys.L;
    const Rational stored(sys.databases[n].symbol_count());
    if (stored != expected) {
      out.push_back("database " + std::to_string(n + 1) + " stores " + to_fraction_string(stored) +
                    " symbols, expected " + to_fraction_string(expected));
    }
  }
  return out;
}

ReadResult run_read(SystemState& sys, std::size_t theta, Transcript* transcript) {
  check_theta(sys, theta);
  const auto queries = make_queries(sys, theta);
  return read_with(sys, queries, transcript);
}

CostLedger run_write(SystemState& sys, std::size_t theta, const FieldVector& delta, Transcript* transcript) {
  check_theta(sys, theta);
  const auto queries = make_queries(sys, theta);
  return write_with(sys, queries, theta, delta, transcript);
}

RoundResult run_round(SystemState& sys, std::size_t theta, const FieldVector& delta, Transcript* transcript) {
  check_theta(sys, theta);
  RoundResult res;
  RoundSummary summary;
  summary.round = sys.round;
  summary.theta_hash = theta_hash(sys, theta);
  if (transcript && transcript->debug_theta) summary.theta = theta;

  const auto queries = make_queries(sys, theta);
  const auto read = read_with(sys, queries, transcript);
  res.read = read.ledger;
  res.read_ok = read.submodel == sys.model[theta];
  res.write = write_with(sys, queries, theta, delta, transcript);
  // Re-read with fresh queries; this verification traffic is not billed.
  const CostLedger saved = sys.ledger;
  const auto saved_segments = sys.segment_ledger;
  res.write_ok = run_read(sys, theta).submodel == sys.model[theta];
  sys.ledger = saved;
  sys.segment_ledger = saved_segments;

  summary.read = res.read;
  summary.write = res.write;
  summary.read_ok = res.read_ok;
  summary.write_ok = res.write_ok;
  if (transcript) transcript->rounds.push_back(summary);
  ++sys.round;
  return res;
}

bool model_consistent(SystemState& sys) {
  const CostLedger saved = sys.ledger;
  const auto saved_segments = sys.segment_ledger;
  bool ok = true;
  for (std::size_t m = 0; m < sys.M; ++m) ok = ok && run_read(sys, m).submodel == sys.model[m];
  sys.ledger = saved;
  sys.segment_ledger = saved_segments;
  return ok;
}

TheoryReport measure_vs_theory(SystemState& sys, std::size_t rounds, Transcript* transcript) {
  if (rounds == 0) throw Error(ErrorCode::kInvalidInput, "need at least one round");
  const CostLedger start = sys.ledger;
  const auto start_segments = sys.segment_ledger;
  TheoryReport rep;
  rep.rounds = rounds;
  std::uniform_int_distribution<std::size_t> pick(0, sys.M - 1);
  for (std::size_t t = 0; t < rounds; ++t) {
    const std::size_t theta = pick(sys.rng);
    const auto delta = sys.field.random_vector(sys.L, sys.rng);
    const auto res = run_round(sys, theta, delta, transcript);
    if (!res.read_ok) ++rep.mismatches;
    if (!res.write_ok) ++rep.mismatches;
  }

  auto diff = [](CostLedger a, const CostLedger& b) {
    a.downloaded -= b.downloaded;
    a.uploaded -= b.uploaded;
    a.useful_read -= b.useful_read;
    a.useful_write -= b.useful_write;
    return a;
  };
  rep.all_equal = rep.mismatches == 0;
  Rational blended_read = 0;
  Rational blended_write = 0;
  for (std::size_t g = 0; g < sys.plan.segments.size(); ++g) {
    const auto& seg = sys.plan.segments[g];
    const auto ledger = diff(sys.segment_ledger[g], start_segments[g]);
    const auto formulas = cost_formulas(seg.code);
    CostComparison c{seg.label,         ledger.read_cost(), ledger.write_cost(), ledger.total_cost(),
                     formulas.read,     formulas.write,     formulas.total,      false};
    c.equal = c.measured_read == c.predicted_read && c.measured_write == c.predicted_write &&
              c.measured_total == c.predicted_total && c.predicted_total == cost_function(seg.code.K, seg.code.R);
    rep.all_equal = rep.all_equal && c.equal;
    blended_read += seg.fraction * formulas.read;
    blended_write += seg.fraction * formulas.write;
    rep.segments.push_back(c);
  }
  const auto total = diff(sys.ledger, start);
  rep.blended = CostComparison{"blended",    total.read_cost(), total.write_cost(), total.total_cost(),
                               blended_read, blended_write,     sys.plan.predicted_cost, false};
  rep.blended.equal = rep.blended.measured_read == blended_read && rep.blended.measured_write == blended_write &&
                      rep.blended.measured_total == sys.plan.predicted_cost &&
                      blended_read + blended_write == sys.plan.predicted_cost;
  rep.all_equal = rep.all_equal && rep.blended.equal;
  return rep;
}

}  // namespace pruw
