#pragma once

// End-to-end simulation of a storage plan: N in-memory databases, a client
// holding the ground-truth model, and exact accounting of every symbol that
// crosses the wire.
//
// Each partition entry of each segment is an independent protocol instance
// over the entry's R databases. Parameters of a submodel are laid out
// segment by segment, entry by entry, subpacket by subpacket, and inside a
// subpacket at j*K + l.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pruw/field.hpp"
#include "pruw/framing.hpp"
#include "pruw/plan.hpp"
#include "pruw/protocol.hpp"
#include "pruw/rational.hpp"

namespace pruw {

struct CostLedger {
  std::uint64_t downloaded = 0;
  std::uint64_t uploaded = 0;
  std::uint64_t useful_read = 0;
  std::uint64_t useful_write = 0;

  CostLedger& operator+=(const CostLedger& rhs);
  Rational read_cost() const;   // downloaded / useful_read
  Rational write_cost() const;  // uploaded / useful_write
  Rational total_cost() const { return read_cost() + write_cost(); }
};

struct Instance {
  std::size_t segment = 0;
  std::size_t entry = 0;
  CodeSpec code;
  std::vector<std::size_t> participants;
  std::vector<std::size_t> null_set;
  std::size_t subpackets = 0;
  std::size_t offset = 0;  // first parameter index inside a submodel
};

// Database-side state. Only ServerQuery and ServerUpdate ever reach it.
class Database {
 public:
  explicit Database(std::size_t index) : index_(index) {}

  std::size_t index() const noexcept { return index_; }
  void store(std::size_t instance, ShardState shard);
  const ShardState& shard(std::size_t instance) const;
  std::size_t symbol_count() const;
  const std::map<std::size_t, ShardState>& shards() const noexcept { return shards_; }

  Answer answer(std::size_t instance, const ServerQuery& query) const;
  void apply(std::size_t instance, const ServerUpdate& update, const ServerQuery& query,
             const CodeSpec& spec, const EvalConstants& consts);

 private:
  std::size_t index_;
  std::map<std::size_t, ShardState> shards_;
};

struct RoundSummary {
  std::size_t round = 0;
  std::string theta_hash;
  std::optional<std::size_t> theta;  // debug transcripts only
  CostLedger read;
  CostLedger write;
  bool read_ok = true;
  bool write_ok = true;
};

// Collects binary frames and per-round summaries. theta is recorded only
// when debug_theta is set.
struct Transcript {
  std::ostream* frames = nullptr;
  bool debug_theta = false;
  std::vector<RoundSummary> rounds;
};

struct SystemState {
  StoragePlan plan;
  PrimeField field{kSimulationPrime};
  std::size_t M = 0;
  std::size_t L = 0;
  std::vector<EvalConstants> consts;  // per segment
  std::vector<Instance> instances;
  std::vector<Database> databases;
  std::vector<FieldVector> model;     // client oracle, M x L
  std::size_t round = 0;
  Rng rng;
  std::uint64_t salt = 0;             // keys the public theta hash
  std::vector<CostLedger> segment_ledger;
  CostLedger ledger;
};

// lcm of the denominators of eta * fraction / (y K) over every entry.
BigInt minimal_L(const StoragePlan& plan);

// Throws IndivisibleL (naming the minimal L) unless L is a multiple of
// minimal_L(plan), and InvalidInput for M < 2.
SystemState init_system(const StoragePlan& plan, std::size_t M, std::size_t L, std::uint64_t seed,
                        std::uint64_t q = kSimulationPrime);

// Stored symbols per database versus constraint(n) * M * L.
std::vector<std::string> occupancy_violations(const SystemState& sys);

struct ReadResult {
  FieldVector submodel;
  CostLedger ledger;
};

// theta is 0-based.
ReadResult run_read(SystemState& sys, std::size_t theta, Transcript* transcript = nullptr);
CostLedger run_write(SystemState& sys, std::size_t theta, const FieldVector& delta,
                     Transcript* transcript = nullptr);

struct RoundResult {
  CostLedger read;
  CostLedger write;
  bool read_ok = false;
  bool write_ok = false;
};

// One read of theta followed by a write of delta using the same queries;
// verifies both against the oracle.
RoundResult run_round(SystemState& sys, std::size_t theta, const FieldVector& delta,
                      Transcript* transcript = nullptr);

// Reads every submodel and compares against the oracle.
bool model_consistent(SystemState& sys);

struct CostComparison {
  std::string label;
  Rational measured_read;
  Rational measured_write;
  Rational measured_total;
  Rational predicted_read;
  Rational predicted_write;
  Rational predicted_total;
  bool equal = false;
};

struct TheoryReport {
  std::vector<CostComparison> segments;
  CostComparison blended;
  std::size_t rounds = 0;
  std::size_t mismatches = 0;  // read or write correctness failures
  bool all_equal = false;
};

// Runs `rounds` random read/write rounds (theta and delta from sys.rng) and
// compares measured costs with the formulas and the plan's prediction.
TheoryReport measure_vs_theory(SystemState& sys, std::size_t rounds, Transcript* transcript = nullptr);

}  // namespace pruw
