#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lwcnn/error.hpp"

namespace lwcnn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  return os.str();
}

inline void check_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("shape must have at least one dimension");
  for (auto d : shape) {
    if (d == 0) throw ShapeError("shape " + shape_to_string(shape) + " has a zero dimension");
  }
}

/// Dense row-major f32 tensor. Rank-3 tensors are laid out height x width x
/// channels with the channel index varying fastest.
class Tensor {
 public:
  static Tensor zeros(Shape shape) {
    check_shape(shape);
    const auto n = shape_product(shape);
    return Tensor(std::move(shape), std::vector<float>(n, 0.0f));
  }

  static Tensor from_data(Shape shape, std::vector<float> values) {
    check_shape(shape);
    if (values.size() != shape_product(shape)) {
      throw ShapeError("data length " + std::to_string(values.size()) + " does not match shape " +
                       shape_to_string(shape));
    }
    return Tensor(std::move(shape), std::move(values));
  }

  static Tensor filled(Shape shape, float value) {
    auto t = zeros(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }

  std::span<const float> data() const noexcept { return data_; }
  // Writable access for kernels filling a freshly constructed output.
  std::span<float> mutable_data() noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  float operator[](std::size_t i) const noexcept { return data_[i]; }
  float& operator[](std::size_t i) noexcept { return data_[i]; }

  // HWC accessors; only meaningful for rank-3 tensors.
  std::size_t height() const { return shape_.at(0); }
  std::size_t width() const { return shape_.at(1); }
  std::size_t channels() const { return shape_.at(2); }
  float at(std::size_t h, std::size_t w, std::size_t c) const {
    return data_[(h * shape_[1] + w) * shape_[2] + c];
  }
  float& at(std::size_t h, std::size_t w, std::size_t c) {
    return data_[(h * shape_[1] + w) * shape_[2] + c];
  }

  Tensor reshaped(Shape shape) const& { return from_data(std::move(shape), data_); }
  Tensor reshaped(Shape shape) && { return from_data(std::move(shape), std::move(data_)); }

  bool all_finite() const {
    for (float v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  // Bitwise equality: shape and every element representation.
  friend bool operator==(const Tensor& a, const Tensor& b) {
    if (a.shape_ != b.shape_) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
      if (std::bit_cast<std::uint32_t>(a.data_[i]) != std::bit_cast<std::uint32_t>(b.data_[i]))
        return false;
    }
    return true;
  }

 private:
  Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {}

  Shape shape_;
  std::vector<float> data_;
};

inline void require_rank3(const Tensor& t, const char* what) {
  if (t.rank() != 3) {
    throw ShapeError(std::string(what) + " expects an HxWxC tensor, got " +
                     shape_to_string(t.shape()));
  }
}

/// SplitMix64 generator. Stream is fully determined by the seed.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// Maps a raw 64-bit draw to [lo, hi): u = raw / 2^64 in double, value = lo + (hi - lo) * u,
// rounded to f32. A result that rounds up to hi is pulled back to the largest float below hi.
inline float uniform_from_raw(std::uint64_t raw, float lo, float hi) noexcept {
  const double u = static_cast<double>(raw) * 0x1.0p-64;
  const double v = static_cast<double>(lo) + (static_cast<double>(hi) - static_cast<double>(lo)) * u;
  float f = static_cast<float>(v);
  if (f >= hi) f = std::nextafter(hi, lo);
  if (f < lo) f = lo;
  return f;
}

/// Deterministic uniform tensor: element i comes from the (i+1)-th SplitMix64 output.
inline Tensor seeded_uniform(Shape shape, std::uint64_t seed, float lo, float hi) {
  if (!(lo < hi)) throw RangeError("seeded_uniform requires lo < hi");
  auto t = Tensor::zeros(std::move(shape));
  SplitMix64 rng(seed);
  for (float& v : t.mutable_data()) v = uniform_from_raw(rng.next(), lo, hi);
  return t;
}

}  // namespace lwcnn
