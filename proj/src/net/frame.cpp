#include "approxifer/net/frame.hpp"

#include <bit>
#include <cstring>

namespace approxifer::net {
namespace {

static_assert(sizeof(double) == 8);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) throw FrameError(ErrorCode::malformed_frame, "frame: payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + frame.payload.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(frame.version);
  out.push_back(static_cast<std::uint8_t>(frame.type));
  put_u64(out, frame.request_id);
  put_u32(out, static_cast<std::uint32_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

FrameHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FrameError(ErrorCode::malformed_frame, "frame: truncated header");
  FrameHeader h;
  std::memcpy(h.magic.data(), bytes.data(), 4);
  h.version = bytes[4];
  h.type = bytes[5];
  h.request_id = get_u64(bytes.data() + 6);
  h.payload_len = get_u32(bytes.data() + 14);
  return h;
}

namespace {

void check_header(const FrameHeader& h) {
  if (!h.magic_ok()) throw FrameError(ErrorCode::malformed_frame, "frame: bad magic");
  if (h.payload_len > kMaxPayload) throw FrameError(ErrorCode::malformed_frame, "frame: payload too large");
  if (h.version != kProtocolVersion) {
    throw FrameError(ErrorCode::bad_version, "frame: unsupported protocol version " + std::to_string(h.version));
  }
  if (!h.type_known()) {
    throw FrameError(ErrorCode::unsupported_type, "frame: unknown message type " + std::to_string(h.type));
  }
}

}  // namespace

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  const FrameHeader h = decode_header(bytes);
  check_header(h);
  if (bytes.size() != kHeaderSize + h.payload_len) {
    throw FrameError(ErrorCode::malformed_frame, "frame: payload_len does not match frame size");
  }
  Frame f;
  f.version = h.version;
  f.type = static_cast<MsgType>(h.type);
  f.request_id = h.request_id;
  f.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return f;
}

std::vector<std::uint8_t> encode_vector_payload(std::span<const double> values) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 8 * values.size());
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

std::vector<double> decode_vector_payload(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) throw FrameError(ErrorCode::malformed_frame, "payload: missing length prefix");
  const std::uint32_t count = get_u32(payload.data());
  if (payload.size() != 4 + 8 * static_cast<std::size_t>(count)) {
    throw FrameError(ErrorCode::malformed_frame, "payload: length prefix does not match payload size");
  }
  std::vector<double> out(count);
  for (std::uint32_t i = 0; i < count; ++i) out[i] = std::bit_cast<double>(get_u64(payload.data() + 4 + 8 * i));
  return out;
}

std::vector<std::uint8_t> encode_error_payload(ErrorCode code, const std::string& message) {
  std::vector<std::uint8_t> out;
  put_u32(out, static_cast<std::uint32_t>(code));
  out.insert(out.end(), message.begin(), message.end());
  return out;
}

std::pair<ErrorCode, std::string> decode_error_payload(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) throw FrameError(ErrorCode::malformed_frame, "error payload: truncated");
  return {static_cast<ErrorCode>(get_u32(payload.data())), std::string(payload.begin() + 4, payload.end())};
}

Frame make_predict_request(std::uint64_t request_id, std::span<const double> query) {
  return Frame{kProtocolVersion, MsgType::predict_req, request_id, encode_vector_payload(query)};
}

Frame make_predict_response(std::uint64_t request_id, std::span<const double> prediction) {
  return Frame{kProtocolVersion, MsgType::predict_resp, request_id, encode_vector_payload(prediction)};
}

Frame make_error(std::uint64_t request_id, ErrorCode code, const std::string& message) {
  return Frame{kProtocolVersion, MsgType::error, request_id, encode_error_payload(code, message)};
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameReader::next() {
  const std::size_t avail = buffer_.size() - offset_;
  if (avail < kHeaderSize) return std::nullopt;
  const std::span<const std::uint8_t> view(buffer_.data() + offset_, avail);
  const FrameHeader h = decode_header(view);
  last_request_id_ = h.request_id;
  if (h.payload_len > kMaxPayload) {
    // Length is unusable; nothing after this point can be trusted.
    offset_ = buffer_.size();
    throw FrameError(ErrorCode::malformed_frame, "frame: payload too large");
  }
  const std::size_t total = kHeaderSize + h.payload_len;
  if (avail < total) return std::nullopt;
  const std::span<const std::uint8_t> whole = view.first(total);
  offset_ += total;
  return decode_frame(whole);
}

}  // namespace approxifer::net
