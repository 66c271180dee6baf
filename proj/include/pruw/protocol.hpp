#pragma once

// Private read-update-write over one (K, R) MDS-coded storage segment.
//
// Every function here operates on a single protocol instance: one code, one
// set of R participating databases, and a run of identical subpackets. Each
// subpacket carries y*K parameters of every one of the M submodels.
//
// Indexing is 0-based throughout: databases index EvalConstants::alpha,
// submodels run over [0, M), coded positions j over [0, y), slots i and
// answer/update lanes l over [0, K).
//
// Client-only material (the submodel index, plaintext updates, noise) never
// appears in ServerQuery or ServerUpdate; database-side functions only take
// those types.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pruw/field.hpp"
#include "pruw/linalg.hpp"
#include "pruw/rational.hpp"

namespace pruw {

struct CodeSpec {
  std::size_t K = 0;  // symbols combined per coded symbol
  std::size_t R = 0;  // databases holding each coded symbol
  std::size_t x = 0;  // storage noise degree
  std::size_t y = 0;  // subpacketization

  std::size_t null_set_size() const noexcept { return x - y; }
  std::size_t params_per_subpacket() const noexcept { return y * K; }

  friend bool operator==(const CodeSpec&, const CodeSpec&) = default;
};

bool is_admissible_code(std::size_t K, std::size_t R);

// Fills x and y from the parity of R - K; throws InfeasibleCode when K is
// outside 1 <= K <= R-3 (odd gap) or 1 <= K <= R-4 (even gap).
CodeSpec derive_code(std::size_t K, std::size_t R);

struct CostFormulas {
  Rational read;
  Rational write;
  Rational total;
};

CostFormulas cost_formulas(const CodeSpec& spec);

// W_{m,j}^{[i]} for one subpacket.
struct PlainSubpacket {
  std::size_t M = 0;
  std::size_t y = 0;
  std::size_t K = 0;
  FieldVector w;  // (m*y + j)*K + i

  static PlainSubpacket zeros(const PrimeField& field, std::size_t M, std::size_t y, std::size_t K);
  static PlainSubpacket random(const PrimeField& field, std::size_t M, std::size_t y, std::size_t K,
                               Rng& rng);
  FieldElement& at(std::size_t m, std::size_t j, std::size_t i) { return w[(m * y + j) * K + i]; }
  const FieldElement& at(std::size_t m, std::size_t j, std::size_t i) const {
    return w[(m * y + j) * K + i];
  }
};

// Z_{j,t}, t = 0..x: one M-vector per (j, t), shared by all databases.
struct StorageNoise {
  std::size_t M = 0;
  std::size_t y = 0;
  std::size_t x = 0;
  FieldVector z;  // (j*(x+1) + t)*M + m

  FieldElement& at(std::size_t j, std::size_t t, std::size_t m) { return z[(j * (x + 1) + t) * M + m]; }
  const FieldElement& at(std::size_t j, std::size_t t, std::size_t m) const {
    return z[(j * (x + 1) + t) * M + m];
  }
};

StorageNoise draw_storage_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M, Rng& rng);
StorageNoise zero_storage_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M);

// One database's M*y symbols for one subpacket, laid out j*M + m.
using ShardColumn = FieldVector;

std::vector<ShardColumn> encode_subpacket(const PlainSubpacket& plain, const CodeSpec& spec,
                                          const EvalConstants& consts,
                                          std::span<const std::size_t> participants,
                                          const StorageNoise& noise);
std::vector<ShardColumn> encode_subpacket(const PlainSubpacket& plain, const CodeSpec& spec,
                                          const EvalConstants& consts,
                                          std::span<const std::size_t> participants, Rng& rng);

// Everything one database stores for one protocol instance.
struct ShardState {
  std::size_t db_index = 0;
  std::size_t M = 0;
  std::size_t y = 0;
  std::size_t subpackets = 0;
  FieldVector symbols;  // subpacket-major: (s*y + j)*M + m

  std::size_t size() const noexcept { return symbols.size(); }
  std::span<FieldElement> subpacket(std::size_t s) {
    return std::span(symbols).subspan(s * y * M, y * M);
  }
  std::span<const FieldElement> subpacket(std::size_t s) const {
    return std::span(symbols).subspan(s * y * M, y * M);
  }
  void append(const ShardColumn& column);
};

// Z~_{j,l}: one M-vector per (j, l), shared by all databases.
struct QueryNoise {
  std::size_t M = 0;
  std::size_t y = 0;
  std::size_t K = 0;
  FieldVector z;  // (j*K + l)*M + m

  FieldElement& at(std::size_t j, std::size_t l, std::size_t m) { return z[(j * K + l) * M + m]; }
  const FieldElement& at(std::size_t j, std::size_t l, std::size_t m) const {
    return z[(j * K + l) * M + m];
  }
};

QueryNoise draw_query_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M, Rng& rng);
QueryNoise zero_query_noise(const PrimeField& field, const CodeSpec& spec, std::size_t M);

// The part of a query a database sees: K vectors Q_{n,l}, each M*y long
// (laid out j*M + m). The same query serves every subpacket.
struct ServerQuery {
  std::size_t db_index = 0;
  std::size_t M = 0;
  std::size_t y = 0;
  std::vector<FieldVector> lanes;
};

struct QueryBundle {
  std::vector<ServerQuery> per_db;  // participant order
  std::size_t theta = 0;            // client-side only

  const ServerQuery& for_db(std::size_t db_index) const;
};

QueryBundle build_queries(std::size_t theta, std::size_t M, const CodeSpec& spec,
                          const EvalConstants& consts, std::span<const std::size_t> participants,
                          const QueryNoise& noise);
QueryBundle build_queries(std::size_t theta, std::size_t M, const CodeSpec& spec,
                          const EvalConstants& consts, std::span<const std::size_t> participants,
                          Rng& rng);

// K answer symbols per subpacket from one database.
struct Answer {
  std::size_t db_index = 0;
  std::vector<FieldVector> per_subpacket;
};

Answer answer_query(const ShardState& shard, const ServerQuery& query);

// Recovers the y*K parameters (index j*K + l) of every subpacket of the
// queried submodel. `answers` must be in participant order.
std::vector<FieldVector> decode_read(std::span<const Answer> answers, const CodeSpec& spec,
                                     const EvalConstants& consts,
                                     std::span<const std::size_t> participants);

// The R x R system for lane l: Cauchy block 1/(f_{j,l} - alpha_n) next to
// the Vandermonde block alpha_n^0..alpha_n^{K+x}.
FieldMatrix decoding_matrix(const CodeSpec& spec, const EvalConstants& consts,
                            std::span<const std::size_t> participants, std::size_t lane);

// The x - y lowest-indexed participants: these skip writing rounds.
std::vector<std::size_t> default_null_set(const CodeSpec& spec, std::span<const std::size_t> participants);

struct ServerUpdate {
  std::size_t db_index = 0;
  std::vector<std::size_t> null_set;        // F, public
  std::vector<FieldVector> per_subpacket;   // K combined updates each
};

struct UpdateBundle {
  std::vector<ServerUpdate> per_db;  // participants not in F, participant order
  std::vector<std::size_t> null_set;

  const ServerUpdate* for_db(std::size_t db_index) const;
};

// zhat_l for every subpacket: subpackets x K.
using UpdateNoise = std::vector<FieldVector>;

UpdateNoise draw_update_noise(const PrimeField& field, const CodeSpec& spec, std::size_t subpackets,
                              Rng& rng);

// `delta` holds, per subpacket, the y*K increments (index j*K + l) of the
// submodel being written.
UpdateBundle build_updates(std::span<const FieldVector> delta, const CodeSpec& spec,
                           const EvalConstants& consts, std::span<const std::size_t> participants,
                           std::span<const std::size_t> null_set, const UpdateNoise& noise);
UpdateBundle build_updates(std::span<const FieldVector> delta, const CodeSpec& spec,
                           const EvalConstants& consts, std::span<const std::size_t> participants,
                           std::span<const std::size_t> null_set, Rng& rng);

// Incremental update of one subpacket's storage at a database: the y*M
// vector sum_l Omega * U * D~ * Q. Exposed for the null-shaper checks.
ShardColumn incremental_update(const FieldVector& combined_updates, const ServerQuery& query,
                               std::span<const std::size_t> null_set, const CodeSpec& spec,
                               const EvalConstants& consts);

// S_n(t) = S_n(t-1) + sum_l Ubar_{n,l}, for every subpacket.
void apply_update(ShardState& shard, const ServerUpdate& update, const ServerQuery& query,
                  const CodeSpec& spec, const EvalConstants& consts);

// Symbol counts for one subpacket of one instance.
struct SubpacketTraffic {
  std::size_t downloaded;
  std::size_t uploaded;
  std::size_t useful;
};

SubpacketTraffic subpacket_traffic(const CodeSpec& spec);

}  // namespace pruw
