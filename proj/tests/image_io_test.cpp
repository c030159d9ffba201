#include <gtest/gtest.h>

#include <string>

#include "lwcnn/bench.hpp"
#include "lwcnn/image_io.hpp"

using namespace lwcnn;

namespace {

std::vector<std::byte> bytes_of(const std::string& s) {
  std::vector<std::byte> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<std::byte>(s[i]);
  return out;
}

ImageErrorKind kind_of(const std::string& s) {
  try {
    read_pnm(bytes_of(s));
  } catch (const ImageError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ImageError";
  return ImageErrorKind::MalformedHeader;
}

}  // namespace

TEST(Pnm, ReadsP5WithComments) {
  const auto t = read_pnm(bytes_of(std::string("P5\n# hello\n2 1\n# x\n255\n") + "\x01\xff"));
  EXPECT_EQ(t.shape(), (Shape{1, 2, 1}));
  EXPECT_EQ(t.values(), (std::vector<float>{1, 255}));
}

TEST(Pnm, ReadsP6Interleaved) {
  const auto t = read_pnm(bytes_of(std::string("P6 1 2 255 ") + "\x01\x02\x03\x04\x05\x06"));
  EXPECT_EQ(t.shape(), (Shape{2, 1, 3}));
  EXPECT_EQ(t.at(1, 0, 2), 6.0f);
}

TEST(Pnm, RasterMayStartWithWhitespaceByte) {
  // Only one byte after maxval is a separator; the next '\n' (10) is pixel data.
  const auto t = read_pnm(bytes_of("P5 2 1 255\n\n\n"));
  EXPECT_EQ(t.values(), (std::vector<float>{10, 10}));
}

TEST(Pnm, Errors) {
  EXPECT_EQ(kind_of("P3 1 1 255\n0 0 0"), ImageErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("GIF89a"), ImageErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("P5 1 1 65535\n\x01\x02"), ImageErrorKind::UnsupportedDepth);
  EXPECT_EQ(kind_of("P5 2 2 255\n\x01"), ImageErrorKind::Truncated);
  EXPECT_EQ(kind_of("P5 2"), ImageErrorKind::Truncated);
  EXPECT_EQ(kind_of("P5 two 2 255\n"), ImageErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of("P5 0 2 255\n"), ImageErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of("P5 4000000 4000000 255\n"), ImageErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of("P"), ImageErrorKind::Truncated);
}

TEST(Pnm, EncodeRoundTrip) {
  auto t = seeded_uniform({5, 7, 3}, 1, 0.0f, 255.0f);
  for (float& v : t.mutable_data()) v = std::round(v);
  EXPECT_TRUE(read_pnm(encode_pnm(t)) == t);
  const auto g = Tensor::from_data({1, 2, 1}, {-4.0f, 300.0f});
  EXPECT_EQ(read_pnm(encode_pnm(g)).values(), (std::vector<float>{0, 255}));
  EXPECT_THROW(encode_pnm(Tensor::zeros({2, 2, 2})), ContractError);
}

TEST(Pnm, CheckedInImage) {
  const auto t = read_pnm_file(std::string(LWCNN_TEST_DATA) + "/person.ppm");
  EXPECT_EQ(t.shape(), (Shape{72, 48, 3}));
}

TEST(Raw, RoundTripAndErrors) {
  const auto t = seeded_uniform({3, 4, 2}, 9, -1.0f, 1.0f);
  const auto bytes = encode_raw(t);
  EXPECT_EQ(bytes.size(), 4 + 4 + 3 * 8 + 4 * t.size());
  EXPECT_TRUE(read_raw(bytes) == t);
  auto bad = bytes;
  bad[0] = std::byte{'X'};
  EXPECT_THROW(read_raw(bad), ImageError);
  EXPECT_THROW(read_raw(std::span(bytes).first(bytes.size() - 1)), ImageError);
  auto extra = bytes;
  extra.push_back(std::byte{0});
  EXPECT_THROW(read_raw(extra), ImageError);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(read_pnm_file("/nonexistent/x.ppm"), IoError);
}

TEST(Bench, MedianAndSingleSample) {
  EXPECT_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_EQ(median_of({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median_of({}), RangeError);
  const auto one = summarize("x", {5.0});
  EXPECT_EQ(one.median_ms, 5.0);
  EXPECT_EQ(one.mean_ms, 5.0);
  EXPECT_EQ(one.min_ms, 5.0);
  int calls = 0;
  const auto r = run_bench("count", 2, 4, [&] { ++calls; });
  EXPECT_EQ(calls, 6);
  EXPECT_EQ(r.times_ms.size(), 4u);
  EXPECT_THROW(run_bench("zero", 0, 0, [] {}), RangeError);
}
