#include <gtest/gtest.h>

#include "lwcnn/preprocess.hpp"

using namespace lwcnn;

TEST(ContrastStretch, StretchesEachChannelToFullRange) {
  const auto x = Tensor::from_data({1, 3, 1}, {50, 100, 150});
  EXPECT_EQ(contrast_stretch(x).values(), (std::vector<float>{0, 128, 255}));
  const auto rgb = Tensor::from_data({1, 2, 3}, {10, 0, 7, 20, 255, 9});
  EXPECT_EQ(contrast_stretch(rgb).values(), (std::vector<float>{0, 0, 0, 255, 255, 255}));
}

TEST(ContrastStretch, RoundsHalfAwayFromZero) {
  // 1 of [0, 2] maps to 127.5 exactly.
  const auto x = Tensor::from_data({1, 3, 1}, {0, 1, 2});
  EXPECT_EQ(contrast_stretch(x).values(), (std::vector<float>{0, 128, 255}));
}

TEST(ContrastStretch, ConstantChannelIsZero) {
  EXPECT_EQ(contrast_stretch(Tensor::filled({2, 2, 1}, 77)).values(),
            (std::vector<float>{0, 0, 0, 0}));
}

TEST(ContrastStretch, Idempotent) {
  const auto x = seeded_uniform({9, 11, 3}, 17, 30.0f, 200.0f);
  const auto once = contrast_stretch(x);
  EXPECT_TRUE(contrast_stretch(once) == once);
}

TEST(BilinearResize, IdentityAndConstant) {
  const auto x = seeded_uniform({5, 6, 3}, 4, 0.0f, 255.0f);
  EXPECT_TRUE(bilinear_resize(x, 5, 6) == x);
  const auto c = bilinear_resize(Tensor::filled({3, 5, 1}, 42.0f), 224, 224);
  EXPECT_EQ(c.shape(), (Shape{224, 224, 1}));
  for (float v : c.data()) EXPECT_FLOAT_EQ(v, 42.0f);
}

TEST(BilinearResize, HalfPixelUpsample) {
  // in = {0, 10}, out = 4: sources -0.25, 0.25, 0.75, 1.25 clamp/interpolate to 0, 2.5, 7.5, 10.
  const auto y = bilinear_resize(Tensor::from_data({1, 2, 1}, {0, 10}), 1, 4);
  EXPECT_EQ(y.values(), (std::vector<float>{0, 2.5f, 7.5f, 10}));
}

TEST(BilinearResize, RejectsZeroSize) {
  EXPECT_THROW(bilinear_resize(Tensor::zeros({2, 2, 1}), 0, 4), ShapeError);
}

TEST(ScaleToUnit, DividesBy255) {
  EXPECT_EQ(scale_to_unit(Tensor::from_data({2}, {0, 255})).values(), (std::vector<float>{0, 1}));
}
