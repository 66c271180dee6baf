#pragma once

// Binary transcript frames. Every field is a little-endian u64:
//   length (number of u64 words that follow), q, M, y, K, R, x, kind, db,
//   count, value[0..count).

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pruw/field.hpp"
#include "pruw/protocol.hpp"

namespace pruw {

enum class FrameKind : std::uint64_t {
  kShard = 1,
  kQuery = 2,
  kAnswer = 3,
  kUpdate = 4,
};

struct FrameHeader {
  std::uint64_t q = 0;
  std::uint64_t M = 0;
  std::uint64_t y = 0;
  std::uint64_t K = 0;
  std::uint64_t R = 0;
  std::uint64_t x = 0;
  FrameKind kind = FrameKind::kShard;
  std::uint64_t db = 0;

  friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

struct Frame {
  FrameHeader header;
  std::vector<std::uint64_t> values;
};

FrameHeader make_header(std::uint64_t q, std::size_t M, const CodeSpec& spec, FrameKind kind,
                        std::size_t db);

std::vector<std::uint8_t> encode_frame(const Frame& frame);
// Throws InvalidInput on truncated or inconsistent input.
Frame decode_frame(const std::vector<std::uint8_t>& bytes);

void write_frame(std::ostream& os, const Frame& frame);
// Returns false at a clean end of stream.
bool read_frame(std::istream& is, Frame& frame);

std::vector<std::uint64_t> flatten(const FieldVector& values);
std::vector<std::uint64_t> flatten(const std::vector<FieldVector>& values);

Frame shard_frame(const ShardState& shard, std::uint64_t q, const CodeSpec& spec);
Frame query_frame(const ServerQuery& query, std::uint64_t q, const CodeSpec& spec);
Frame answer_frame(const Answer& answer, std::uint64_t q, std::size_t M, const CodeSpec& spec);
Frame update_frame(const ServerUpdate& update, std::uint64_t q, std::size_t M, const CodeSpec& spec);

}  // namespace pruw
