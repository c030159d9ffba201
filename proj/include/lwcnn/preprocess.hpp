#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <vector>

#include "lwcnn/tensor.hpp"

namespace lwcnn {

/// Per-channel linear stretch of [min_c, max_c] onto [0, 255], rounded half away from zero.
/// A constant channel maps to all zeros.
inline Tensor contrast_stretch(const Tensor& image) {
  require_rank3(image, "contrast_stretch");
  const std::size_t c = image.channels();
  std::vector<float> lo(c, std::numeric_limits<float>::infinity());
  std::vector<float> hi(c, -std::numeric_limits<float>::infinity());
  const auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    lo[i % c] = std::min(lo[i % c], src[i]);
    hi[i % c] = std::max(hi[i % c], src[i]);
  }
  auto out = image;
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t ch = i % c;
    if (hi[ch] == lo[ch]) {
      dst[i] = 0.0f;
      continue;
    }
    const double scaled = (static_cast<double>(src[i]) - lo[ch]) * 255.0 /
                          (static_cast<double>(hi[ch]) - lo[ch]);
    dst[i] = static_cast<float>(std::round(scaled));
  }
  return out;
}

/// Bilinear resampling with half-pixel centres: source = (i + 0.5) * in / out - 0.5,
/// clamped to the image. Arithmetic in double, stored as f32.
inline Tensor bilinear_resize(const Tensor& image, std::size_t out_h, std::size_t out_w) {
  require_rank3(image, "bilinear_resize");
  if (out_h == 0 || out_w == 0) throw ShapeError("bilinear_resize: output size must be positive");
  const std::size_t in_h = image.height();
  const std::size_t in_w = image.width();
  const std::size_t c = image.channels();

  struct Tap {
    std::size_t i0, i1;
    double frac;
  };
  auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
      double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(s));
      t[i] = {i0, std::min(i0 + 1, in - 1), s - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ys = taps(in_h, out_h);
  const auto xs = taps(in_w, out_w);

  auto out = Tensor::zeros({out_h, out_w, c});
  for (std::size_t y = 0; y < out_h; ++y) {
    const auto& ty = ys[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double top = image.at(ty.i0, tx.i0, ch) * (1.0 - tx.frac) +
                           image.at(ty.i0, tx.i1, ch) * tx.frac;
        const double bottom = image.at(ty.i1, tx.i0, ch) * (1.0 - tx.frac) +
                              image.at(ty.i1, tx.i1, ch) * tx.frac;
        out.at(y, x, ch) = static_cast<float>(top * (1.0 - ty.frac) + bottom * ty.frac);
      }
    }
  }
  return out;
}

/// Divides every value by 255 so 8-bit intensities land in [0, 1].
inline Tensor scale_to_unit(const Tensor& image) {
  auto out = image;
  for (float& v : out.mutable_data()) v = static_cast<float>(static_cast<double>(v) / 255.0);
  return out;
}

}  // namespace lwcnn
