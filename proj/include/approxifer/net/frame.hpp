#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace approxifer::net {

// Wire format, all integers little-endian:
//   magic "AXIF" | version u8 | msg_type u8 | request_id u64 | payload_len u32 | payload
inline constexpr std::array<std::uint8_t, 4> kMagic{'A', 'X', 'I', 'F'};
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 18;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class MsgType : std::uint8_t { hello = 1, predict_req = 2, predict_resp = 3, error = 4, ping = 5 };

enum class ErrorCode : std::uint32_t {
  malformed_frame = 1,
  dimension_mismatch = 2,
  unsupported_type = 3,
  bad_version = 4,
  internal = 5,
};

struct Frame {
  std::uint8_t version = kProtocolVersion;
  MsgType type = MsgType::ping;
  std::uint64_t request_id = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

class FrameError : public std::runtime_error {
 public:
  FrameError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct FrameHeader {
  std::array<std::uint8_t, 4> magic{};
  std::uint8_t version = 0;
  std::uint8_t type = 0;
  std::uint64_t request_id = 0;
  std::uint32_t payload_len = 0;

  bool magic_ok() const { return magic == kMagic; }
  bool type_known() const { return type >= 1 && type <= 5; }
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
FrameHeader decode_header(std::span<const std::uint8_t> bytes);
// Strict parse of exactly one complete frame.
Frame decode_frame(std::span<const std::uint8_t> bytes);

// {count u32, count f64}: the PREDICT_REQ and PREDICT_RESP payload.
std::vector<std::uint8_t> encode_vector_payload(std::span<const double> values);
std::vector<double> decode_vector_payload(std::span<const std::uint8_t> payload);

// {code u32, utf-8 message}
std::vector<std::uint8_t> encode_error_payload(ErrorCode code, const std::string& message);
std::pair<ErrorCode, std::string> decode_error_payload(std::span<const std::uint8_t> payload);

Frame make_predict_request(std::uint64_t request_id, std::span<const double> query);
Frame make_predict_response(std::uint64_t request_id, std::span<const double> prediction);
Frame make_error(std::uint64_t request_id, ErrorCode code, const std::string& message);

// Incremental reassembly of frames from a byte stream.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  // Next complete frame, if any. Throws FrameError on a bad header; the
  // offending frame's bytes are dropped when its length is usable, so the
  // stream can continue.
  std::optional<Frame> next();
  std::size_t buffered() const { return buffer_.size() - offset_; }
  // request_id of the most recently decoded header, for error replies.
  std::uint64_t last_request_id() const { return last_request_id_; }

 private:
  std::uint64_t last_request_id_ = 0;
  std::vector<std::uint8_t> buffer_;
  std::size_t offset_ = 0;
};

}  // namespace approxifer::net
