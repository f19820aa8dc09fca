#include <bit>
#include <random>

#include <gtest/gtest.h>

#include "approxifer/net/frame.hpp"

using namespace approxifer::net;

namespace {

Frame random_frame(std::mt19937_64& rng) {
  Frame f;
  f.version = kProtocolVersion;
  f.type = static_cast<MsgType>(1 + rng() % 5);
  f.request_id = rng();
  const std::size_t len = rng() % 300;
  f.payload.resize(len);
  for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng());
  return f;
}

}  // namespace

TEST(Frame, HeaderLayoutLittleEndian) {
  const Frame f{kProtocolVersion, MsgType::predict_req, 0x0102030405060708ULL, {0xAA, 0xBB}};
  const auto bytes = encode_frame(f);
  ASSERT_EQ(bytes.size(), kHeaderSize + 2);
  EXPECT_EQ(bytes[0], 'A');
  EXPECT_EQ(bytes[3], 'F');
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 2);
  EXPECT_EQ(bytes[6], 0x08);
  EXPECT_EQ(bytes[13], 0x01);
  EXPECT_EQ(bytes[14], 2);
  EXPECT_EQ(bytes[15], 0);
  EXPECT_EQ(bytes[18], 0xAA);
}

TEST(Frame, RoundTripRandomFramesAllTypes) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const Frame f = random_frame(rng);
    EXPECT_EQ(decode_frame(encode_frame(f)), f);
  }
}

TEST(Frame, VectorPayloadBitExact) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(rng() % 40);
    for (double& x : v) x = std::bit_cast<double>(rng() & 0x7fefffffffffffffULL);
    if (!v.empty()) v[0] = -0.0;
    const auto back = decode_vector_payload(encode_vector_payload(v));
    ASSERT_EQ(back.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(v[i]));
  }
  const auto req = make_predict_request(7, std::vector<double>{1.5, -2.0});
  EXPECT_EQ(req.type, MsgType::predict_req);
  EXPECT_EQ(decode_vector_payload(req.payload), (std::vector<double>{1.5, -2.0}));
}

TEST(Frame, ErrorPayload) {
  const auto e = make_error(9, ErrorCode::dimension_mismatch, "bad dim");
  const auto [code, msg] = decode_error_payload(decode_frame(encode_frame(e)).payload);
  EXPECT_EQ(code, ErrorCode::dimension_mismatch);
  EXPECT_EQ(msg, "bad dim");
}

TEST(Frame, MalformedInputs) {
  auto bytes = encode_frame(make_predict_request(1, std::vector<double>{1.0}));
  EXPECT_THROW(decode_frame(std::span(bytes).first(10)), FrameError);
  auto bad_magic = bytes;
  bad_magic[0] = 'Z';
  EXPECT_THROW(decode_frame(bad_magic), FrameError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  try {
    decode_frame(bad_version);
    FAIL();
  } catch (const FrameError& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::bad_version);
  }
  auto bad_type = bytes;
  bad_type[5] = 77;
  try {
    decode_frame(bad_type);
    FAIL();
  } catch (const FrameError& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::unsupported_type);
  }
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(decode_frame(extra), FrameError);
  EXPECT_THROW(decode_vector_payload(std::vector<std::uint8_t>{3, 0, 0, 0, 1}), FrameError);
}

TEST(FrameReader, ByteAtATimeAndBackToBack) {
  std::mt19937_64 rng(3);
  std::vector<Frame> frames;
  std::vector<std::uint8_t> stream;
  for (int t = 0; t < 50; ++t) {
    frames.push_back(random_frame(rng));
    const auto b = encode_frame(frames.back());
    stream.insert(stream.end(), b.begin(), b.end());
  }
  FrameReader reader;
  std::vector<Frame> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    const std::size_t chunk = std::min<std::size_t>(1 + rng() % 64, stream.size() - pos);
    reader.feed(std::span(stream).subspan(pos, chunk));
    pos += chunk;
    while (auto f = reader.next()) got.push_back(*f);
  }
  EXPECT_EQ(got, frames);
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(FrameReader, BadFrameIsDroppedAndStreamContinues) {
  auto bad = encode_frame(make_predict_request(5, std::vector<double>{1.0}));
  bad[4] = 3;  // unsupported version
  const auto good = encode_frame(make_predict_request(6, std::vector<double>{2.0}));
  FrameReader reader;
  reader.feed(bad);
  reader.feed(good);
  EXPECT_THROW(reader.next(), FrameError);
  EXPECT_EQ(reader.last_request_id(), 5u);
  const auto f = reader.next();
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(f->request_id, 6u);
}
