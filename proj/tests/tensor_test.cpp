#include <gtest/gtest.h>

#include "lwcnn/tensor.hpp"

using namespace lwcnn;

TEST(Tensor, ZerosHasShapeAndZeroData) {
  const auto a = Tensor::zeros({2, 2});
  EXPECT_EQ(a.shape(), (Shape{2, 2}));
  EXPECT_EQ(a.values(), (std::vector<float>{0, 0, 0, 0}));
  EXPECT_EQ(Tensor::zeros({1}).values(), (std::vector<float>{0}));
  const auto c = Tensor::zeros({3, 3, 2});
  EXPECT_EQ(c.size(), 18u);
  EXPECT_EQ(c.shape(), (Shape{3, 3, 2}));
}

TEST(Tensor, ZerosRejectsEmptyOrZeroDims) {
  EXPECT_THROW(Tensor::zeros({}), ShapeError);
  EXPECT_THROW(Tensor::zeros({2, 0}), ShapeError);
}

TEST(Tensor, FromDataWrapsRowMajor) {
  const auto v = Tensor::from_data({2}, {1, 2});
  EXPECT_EQ(v.values(), (std::vector<float>{1, 2}));
  const auto px = Tensor::from_data({1, 1, 3}, {5, 6, 7});
  EXPECT_EQ(px.at(0, 0, 0), 5.0f);
  EXPECT_EQ(px.at(0, 0, 2), 7.0f);
  EXPECT_THROW(Tensor::from_data({2, 2}, {1, 2, 3}), ShapeError);
}

TEST(Tensor, HwcLayoutHasChannelFastest) {
  const auto t = Tensor::from_data({2, 2, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_EQ(t.at(0, 1, 0), 2.0f);
  EXPECT_EQ(t.at(1, 0, 1), 5.0f);
}

TEST(SplitMix64, MatchesReferenceStream) {
  // Hand-stepped from the reference algorithm (seed 0).
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(rng.next(), 0x06C45D188009454Full);
}

TEST(SeededUniform, FirstElementMapsFirstDraw) {
  // 0xE220A8397B1DCDAF / 2^64 = 0.88331080...; scaled to [-1, 1) gives 0.7666216.
  const auto t = seeded_uniform({3}, 0, -1.0f, 1.0f);
  EXPECT_FLOAT_EQ(t[0], 0.7666216f);
  const auto u = seeded_uniform({1}, 0, 0.0f, 1.0f);
  EXPECT_FLOAT_EQ(u[0], 0.8833108f);
  const auto s42 = seeded_uniform({3}, 42, 0.0f, 1.0f);
  EXPECT_FLOAT_EQ(s42[0], 0.74156487f);
  EXPECT_FLOAT_EQ(s42[1], 0.1599104f);
  EXPECT_FLOAT_EQ(s42[2], 0.27860114f);
}

TEST(SeededUniform, DeterministicAndInRange) {
  const auto a = seeded_uniform({7, 5, 3}, 1234, 0.0f, 1.0f);
  const auto b = seeded_uniform({7, 5, 3}, 1234, 0.0f, 1.0f);
  EXPECT_TRUE(a == b);
  for (float v : a.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LT(v, 1.0f);
  }
  EXPECT_FALSE(a == seeded_uniform({7, 5, 3}, 1235, 0.0f, 1.0f));
}

TEST(SeededUniform, RejectsEmptyRange) {
  EXPECT_THROW(seeded_uniform({2}, 0, 1.0f, 1.0f), RangeError);
  EXPECT_THROW(seeded_uniform({2}, 0, 2.0f, 1.0f), RangeError);
}

TEST(SeededUniform, TopDrawStaysBelowHi) {
  EXPECT_LT(uniform_from_raw(~0ull, 0.0f, 1.0f), 1.0f);
  EXPECT_LT(uniform_from_raw(~0ull, -0.05f, 0.05f), 0.05f);
}

TEST(Tensor, FromDataReproducesAnyTensor) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng(seed);
    Shape shape;
    const auto rank = 1 + rng.next() % 4;
    for (std::size_t i = 0; i < rank; ++i) shape.push_back(1 + rng.next() % 5);
    const auto t = seeded_uniform(shape, seed, -3.0f, 3.0f);
    EXPECT_TRUE(Tensor::from_data(t.shape(), t.values()) == t);
    EXPECT_EQ(t.size(), shape_product(t.shape()));
  }
}
