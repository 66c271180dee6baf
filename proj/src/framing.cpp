#include "pruw/framing.hpp"

#include <istream>
#include <ostream>

#include "pruw/error.hpp"

namespace pruw {

namespace {

constexpr std::size_t kHeaderWords = 9;  // q M y K R x kind db count

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace

FrameHeader make_header(std::uint64_t q, std::size_t M, const CodeSpec& spec, FrameKind kind,
                        std::size_t db) {
  return FrameHeader{q, M, spec.y, spec.K, spec.R, spec.x, kind, db};
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  const auto& h = frame.header;
  std::vector<std::uint8_t> out;
  out.reserve(8 * (1 + kHeaderWords + frame.values.size()));
  put_u64(out, kHeaderWords + frame.values.size());
  for (std::uint64_t v : {h.q, h.M, h.y, h.K, h.R, h.x, static_cast<std::uint64_t>(h.kind), h.db,
                          static_cast<std::uint64_t>(frame.values.size())}) {
    put_u64(out, v);
  }
  for (std::uint64_t v : frame.values) put_u64(out, v);
  return out;
}

Frame decode_frame(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 * (1 + kHeaderWords) || bytes.size() % 8 != 0) {
    throw Error(ErrorCode::kInvalidInput, "frame too short");
  }
  const std::uint64_t length = get_u64(bytes.data());
  if (length + 1 != bytes.size() / 8) throw Error(ErrorCode::kInvalidInput, "frame length mismatch");
  std::vector<std::uint64_t> words(length);
  for (std::size_t i = 0; i < length; ++i) words[i] = get_u64(bytes.data() + 8 * (i + 1));
  Frame frame;
  frame.header = FrameHeader{words[0], words[1], words[2], words[3],
                             words[4], words[5], static_cast<FrameKind>(words[6]), words[7]};
  if (words[8] != length - kHeaderWords) throw Error(ErrorCode::kInvalidInput, "frame count mismatch");
  frame.values.assign(words.begin() + kHeaderWords, words.end());
  return frame;
}

void write_frame(std::ostream& os, const Frame& frame) {
  const auto bytes = encode_frame(frame);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

bool read_frame(std::istream& is, Frame& frame) {
  std::vector<std::uint8_t> bytes(8);
  if (!is.read(reinterpret_cast<char*>(bytes.data()), 8)) {
    if (is.gcount() == 0) return false;
    throw Error(ErrorCode::kInvalidInput, "truncated frame length");
  }
  const std::uint64_t length = get_u64(bytes.data());
  if (length < kHeaderWords || length > (1ULL << 32)) {
    throw Error(ErrorCode::kInvalidInput, "implausible frame length");
  }
  bytes.resize(8 * (length + 1));
  if (!is.read(reinterpret_cast<char*>(bytes.data() + 8), static_cast<std::streamsize>(8 * length))) {
    throw Error(ErrorCode::kInvalidInput, "truncated frame body");
  }
  frame = decode_frame(bytes);
  return true;
}

std::vector<std::uint64_t> flatten(const FieldVector& values) {
  std::vector<std::uint64_t> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.value());
  return out;
}

std::vector<std::uint64_t> flatten(const std::vector<FieldVector>& values) {
  std::vector<std::uint64_t> out;
  for (const auto& row : values) {
    for (const auto& v : row) out.push_back(v.value());
  }
  return out;
}

Frame shard_frame(const ShardState& shard, std::uint64_t q, const CodeSpec& spec) {
  return Frame{make_header(q, shard.M, spec, FrameKind::kShard, shard.db_index), flatten(shard.symbols)};
}

Frame query_frame(const ServerQuery& query, std::uint64_t q, const CodeSpec& spec) {
  return Frame{make_header(q, query.M, spec, FrameKind::kQuery, query.db_index), flatten(query.lanes)};
}

Frame answer_frame(const Answer& answer, std::uint64_t q, std::size_t M, const CodeSpec& spec) {
  return Frame{make_header(q, M, spec, FrameKind::kAnswer, answer.db_index),
               flatten(answer.per_subpacket)};
}

Frame update_frame(const ServerUpdate& update, std::uint64_t q, std::size_t M, const CodeSpec& spec) {
  return Frame{make_header(q, M, spec, FrameKind::kUpdate, update.db_index),
               flatten(update.per_subpacket)};
}

}  // namespace pruw
