#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lwcnn/tensor.hpp"

namespace lwcnn {

enum class Padding : std::uint8_t { Same = 0, Valid = 1 };

/// Kernels D_k x D_k x M x N plus one bias per output channel.
struct ConvWeights {
  Tensor kernels;
  Tensor bias;

  std::size_t kernel_size() const { return kernels.dim(0); }
  std::size_t in_channels() const { return kernels.dim(2); }
  std::size_t out_channels() const { return kernels.dim(3); }

  void check() const {
    if (kernels.rank() != 4 || kernels.dim(0) != kernels.dim(1))
      throw ShapeError("conv kernels must be DkxDkxMxN, got " + shape_to_string(kernels.shape()));
    if (bias.rank() != 1 || bias.dim(0) != out_channels())
      throw ShapeError("conv bias must have length " + std::to_string(out_channels()));
  }
};

/// One D_k x D_k filter per channel: kernels D_k x D_k x M, bias M.
struct DepthwiseWeights {
  Tensor kernels;
  Tensor bias;

  std::size_t kernel_size() const { return kernels.dim(0); }
  std::size_t channels() const { return kernels.dim(2); }

  void check() const {
    if (kernels.rank() != 3 || kernels.dim(0) != kernels.dim(1))
      throw ShapeError("depthwise kernels must be DkxDkxM, got " +
                       shape_to_string(kernels.shape()));
    if (bias.rank() != 1 || bias.dim(0) != channels())
      throw ShapeError("depthwise bias must have length " + std::to_string(channels()));
  }
};

struct BatchNormParams {
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  float epsilon = 1e-3f;
};

// Multiply-accumulate counter threaded through the reference kernels.
struct MacCounter {
  std::uint64_t macs = 0;
};

/// Output extent and leading zero-pad for one spatial axis.
struct AxisGeometry {
  std::size_t out = 0;
  std::size_t pad_before = 0;
};

// Same: out = ceil(in / stride), total pad split with the smaller half first.
// Valid: out = (in - k) / stride + 1, requires k <= in.
inline AxisGeometry axis_geometry(std::size_t in, std::size_t kernel, std::size_t stride,
                                  Padding padding) {
  if (kernel == 0 || stride == 0) throw ShapeError("kernel and stride must be positive");
  if (padding == Padding::Valid) {
    if (kernel > in) {
      throw ShapeError("valid padding: kernel " + std::to_string(kernel) +
                       " exceeds input extent " + std::to_string(in));
    }
    return {(in - kernel) / stride + 1, 0};
  }
  const std::size_t out = (in + stride - 1) / stride;
  const std::size_t needed = (out - 1) * stride + kernel;
  const std::size_t total = needed > in ? needed - in : 0;
  return {out, total / 2};
}

namespace detail {

struct ConvGeometry {
  AxisGeometry rows;
  AxisGeometry cols;
};

inline ConvGeometry conv_geometry(const Tensor& input, std::size_t kernel, std::size_t stride,
                                  Padding padding) {
  return {axis_geometry(input.height(), kernel, stride, padding),
          axis_geometry(input.width(), kernel, stride, padding)};
}

// Input coordinate for output index o and kernel tap k; negative or >= extent means padding.
inline std::ptrdiff_t source_index(std::size_t o, std::size_t k, std::size_t stride,
                                   std::size_t pad) {
  return static_cast<std::ptrdiff_t>(o * stride + k) - static_cast<std::ptrdiff_t>(pad);
}

}  // namespace detail

/// Reference convolution: one independent windowed dot product per output element,
/// padded taps read as zero and still counted as multiplies. Kept deliberately naive.
inline Tensor conv2d_direct(const Tensor& input, const ConvWeights& w, std::size_t stride,
                            Padding padding, MacCounter* counter = nullptr) {
  require_rank3(input, "conv2d_direct");
  w.check();
  const std::size_t k = w.kernel_size();
  const std::size_t m = w.in_channels();
  const std::size_t n = w.out_channels();
  if (input.channels() != m) {
    throw ShapeError("conv2d: input has " + std::to_string(input.channels()) +
                     " channels, kernels expect " + std::to_string(m));
  }
  const auto geo = detail::conv_geometry(input, k, stride, padding);
  const auto ih = static_cast<std::ptrdiff_t>(input.height());
  const auto iw = static_cast<std::ptrdiff_t>(input.width());
  auto out = Tensor::zeros({geo.rows.out, geo.cols.out, n});
  std::uint64_t macs = 0;
  for (std::size_t oy = 0; oy < geo.rows.out; ++oy) {
    for (std::size_t ox = 0; ox < geo.cols.out; ++ox) {
      for (std::size_t oc = 0; oc < n; ++oc) {
        double acc = 0.0;
        for (std::size_t ky = 0; ky < k; ++ky) {
          for (std::size_t kx = 0; kx < k; ++kx) {
            for (std::size_t ic = 0; ic < m; ++ic) {
              const auto y = detail::source_index(oy, ky, stride, geo.rows.pad_before);
              const auto x = detail::source_index(ox, kx, stride, geo.cols.pad_before);
              float v = 0.0f;
              if (y >= 0 && y < ih && x >= 0 && x < iw) {
                v = input.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), ic);
              }
              acc += static_cast<double>(v) *
                     static_cast<double>(w.kernels[((ky * k + kx) * m + ic) * n + oc]);
              ++macs;
            }
          }
        }
        out.at(oy, ox, oc) = static_cast<float>(acc + static_cast<double>(w.bias[oc]));
      }
    }
  }
  if (counter) counter->macs += macs;
  return out;
}

/// Convolution with the same contract as conv2d_direct. Loops are reordered so the
/// innermost loop runs over contiguous output channels for every (pixel, tap, input channel).
inline Tensor conv2d(const Tensor& input, const ConvWeights& w, std::size_t stride,
                     Padding padding) {
  require_rank3(input, "conv2d");
  w.check();
  const std::size_t k = w.kernel_size();
  const std::size_t m = w.in_channels();
  const std::size_t n = w.out_channels();
  if (input.channels() != m) {
    throw ShapeError("conv2d: input has " + std::to_string(input.channels()) +
                     " channels, kernels expect " + std::to_string(m));
  }
  const auto geo = detail::conv_geometry(input, k, stride, padding);
  const auto ih = static_cast<std::ptrdiff_t>(input.height());
  const auto iw = static_cast<std::ptrdiff_t>(input.width());
  auto out = Tensor::zeros({geo.rows.out, geo.cols.out, n});
  const float* src = input.data().data();
  const float* wk = w.kernels.data().data();
  const float* bias = w.bias.data().data();
  float* dst = out.mutable_data().data();
  std::vector<float> acc(n);
  for (std::size_t oy = 0; oy < geo.rows.out; ++oy) {
    for (std::size_t ox = 0; ox < geo.cols.out; ++ox) {
      std::copy(bias, bias + n, acc.begin());
      for (std::size_t ky = 0; ky < k; ++ky) {
        const auto y = detail::source_index(oy, ky, stride, geo.rows.pad_before);
        if (y < 0 || y >= ih) continue;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const auto x = detail::source_index(ox, kx, stride, geo.cols.pad_before);
          if (x < 0 || x >= iw) continue;
          const float* pixel = src + (static_cast<std::size_t>(y) * input.width() +
                                      static_cast<std::size_t>(x)) * m;
          const float* tap = wk + (ky * k + kx) * m * n;
          for (std::size_t ic = 0; ic < m; ++ic) {
            const float v = pixel[ic];
            const float* row = tap + ic * n;
            float* a = acc.data();
            for (std::size_t oc = 0; oc < n; ++oc) a[oc] += v * row[oc];
          }
        }
      }
      std::copy(acc.begin(), acc.end(), dst + (oy * geo.cols.out + ox) * n);
    }
  }
  return out;
}

/// Per-channel spatial convolution; output channel c depends only on input channel c.
inline Tensor depthwise_conv2d(const Tensor& input, const DepthwiseWeights& w, std::size_t stride,
                               Padding padding) {
  require_rank3(input, "depthwise_conv2d");
  w.check();
  const std::size_t k = w.kernel_size();
  const std::size_t m = w.channels();
  if (input.channels() != m) {
    throw ShapeError("depthwise_conv2d: input has " + std::to_string(input.channels()) +
                     " channels, filters expect " + std::to_string(m));
  }
  const auto geo = detail::conv_geometry(input, k, stride, padding);
  const auto ih = static_cast<std::ptrdiff_t>(input.height());
  const auto iw = static_cast<std::ptrdiff_t>(input.width());
  auto out = Tensor::zeros({geo.rows.out, geo.cols.out, m});
  const float* src = input.data().data();
  const float* wk = w.kernels.data().data();
  float* dst = out.mutable_data().data();
  for (std::size_t oy = 0; oy < geo.rows.out; ++oy) {
    for (std::size_t ox = 0; ox < geo.cols.out; ++ox) {
      float* acc = dst + (oy * geo.cols.out + ox) * m;
      std::copy(w.bias.data().begin(), w.bias.data().end(), acc);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const auto y = detail::source_index(oy, ky, stride, geo.rows.pad_before);
        if (y < 0 || y >= ih) continue;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const auto x = detail::source_index(ox, kx, stride, geo.cols.pad_before);
          if (x < 0 || x >= iw) continue;
          const float* pixel = src + (static_cast<std::size_t>(y) * input.width() +
                                      static_cast<std::size_t>(x)) * m;
          const float* tap = wk + (ky * k + kx) * m;
          for (std::size_t c = 0; c < m; ++c) acc[c] += pixel[c] * tap[c];
        }
      }
    }
  }
  return out;
}

/// Reference depthwise convolution: conv2d_direct applied to each channel on its own.
inline Tensor depthwise_conv2d_direct(const Tensor& input, const DepthwiseWeights& w,
                                      std::size_t stride, Padding padding,
                                      MacCounter* counter = nullptr) {
  require_rank3(input, "depthwise_conv2d_direct");
  w.check();
  const std::size_t k = w.kernel_size();
  const std::size_t m = w.channels();
  if (input.channels() != m) {
    throw ShapeError("depthwise_conv2d: input has " + std::to_string(input.channels()) +
                     " channels, filters expect " + std::to_string(m));
  }
  const auto geo = detail::conv_geometry(input, k, stride, padding);
  auto out = Tensor::zeros({geo.rows.out, geo.cols.out, m});
  for (std::size_t c = 0; c < m; ++c) {
    auto plane = Tensor::zeros({input.height(), input.width(), 1});
    for (std::size_t y = 0; y < input.height(); ++y)
      for (std::size_t x = 0; x < input.width(); ++x) plane.at(y, x, 0) = input.at(y, x, c);
    auto kernel = Tensor::zeros({k, k, 1, 1});
    for (std::size_t t = 0; t < k * k; ++t) kernel[t] = w.kernels[t * m + c];
    const ConvWeights single{std::move(kernel), Tensor::filled({1}, w.bias[c])};
    const auto result = conv2d_direct(plane, single, stride, padding, counter);
    for (std::size_t y = 0; y < geo.rows.out; ++y)
      for (std::size_t x = 0; x < geo.cols.out; ++x) out.at(y, x, c) = result.at(y, x, 0);
  }
  return out;
}

/// 1x1 convolution: a per-pixel linear map from M to N channels.
inline Tensor pointwise_conv2d(const Tensor& input, const ConvWeights& w) {
  w.check();
  if (w.kernel_size() != 1) {
    throw ContractError("pointwise_conv2d requires 1x1 kernels, got " +
                        std::to_string(w.kernel_size()) + "x" + std::to_string(w.kernel_size()));
  }
  return conv2d(input, w, 1, Padding::Same);
}

/// Depthwise-separable layer: depthwise (stride and padding apply here) then pointwise.
inline Tensor dsc_layer(const Tensor& input, const DepthwiseWeights& dw, const ConvWeights& pw,
                        std::size_t stride = 1, Padding padding = Padding::Same) {
  dw.check();
  pw.check();
  if (pw.in_channels() != dw.channels()) {
    throw ShapeError("dsc_layer: pointwise expects " + std::to_string(pw.in_channels()) +
                     " channels, depthwise produces " + std::to_string(dw.channels()));
  }
  return pointwise_conv2d(depthwise_conv2d(input, dw, stride, padding), pw);
}

/// Reference path for dsc_layer built only from conv2d_direct calls.
inline Tensor dsc_layer_direct(const Tensor& input, const DepthwiseWeights& dw,
                               const ConvWeights& pw, std::size_t stride = 1,
                               Padding padding = Padding::Same, MacCounter* counter = nullptr) {
  if (pw.kernel_size() != 1) throw ContractError("dsc_layer: pointwise kernels must be 1x1");
  if (pw.in_channels() != dw.channels()) {
    throw ShapeError("dsc_layer: pointwise expects " + std::to_string(pw.in_channels()) +
                     " channels, depthwise produces " + std::to_string(dw.channels()));
  }
  const auto mid = depthwise_conv2d_direct(input, dw, stride, padding, counter);
  return conv2d_direct(mid, pw, 1, Padding::Same, counter);
}

/// Non-overlapping 2x2 max pooling. An odd trailing row or column is dropped.
inline Tensor maxpool2(const Tensor& input) {
  require_rank3(input, "maxpool2");
  if (input.height() < 2 || input.width() < 2) {
    throw ShapeError("maxpool2 needs at least 2x2 spatial input, got " +
                     shape_to_string(input.shape()));
  }
  const std::size_t oh = input.height() / 2;
  const std::size_t ow = input.width() / 2;
  const std::size_t c = input.channels();
  auto out = Tensor::zeros({oh, ow, c});
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        out.at(y, x, ch) = std::max({input.at(2 * y, 2 * x, ch), input.at(2 * y, 2 * x + 1, ch),
                                     input.at(2 * y + 1, 2 * x, ch),
                                     input.at(2 * y + 1, 2 * x + 1, ch)});
      }
    }
  }
  return out;
}

/// Mean pooling over kernel x kernel windows without padding.
inline Tensor avgpool(const Tensor& input, std::size_t kernel, std::size_t stride) {
  require_rank3(input, "avgpool");
  const auto rows = axis_geometry(input.height(), kernel, stride, Padding::Valid);
  const auto cols = axis_geometry(input.width(), kernel, stride, Padding::Valid);
  const std::size_t c = input.channels();
  auto out = Tensor::zeros({rows.out, cols.out, c});
  const double scale = 1.0 / static_cast<double>(kernel * kernel);
  for (std::size_t y = 0; y < rows.out; ++y) {
    for (std::size_t x = 0; x < cols.out; ++x) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        double sum = 0.0;
        for (std::size_t ky = 0; ky < kernel; ++ky)
          for (std::size_t kx = 0; kx < kernel; ++kx)
            sum += input.at(y * stride + ky, x * stride + kx, ch);
        out.at(y, x, ch) = static_cast<float>(sum * scale);
      }
    }
  }
  return out;
}

inline Tensor relu(const Tensor& input) {
  auto out = input;
  for (float& v : out.mutable_data()) v = std::max(v, 0.0f);
  return out;
}

/// Inference batch norm: y = gamma * (x - mean) / sqrt(var + eps) + beta, per channel.
inline Tensor batchnorm_infer(const Tensor& input, const BatchNormParams& p) {
  require_rank3(input, "batchnorm_infer");
  const std::size_t c = input.channels();
  for (const Tensor* t : {&p.gamma, &p.beta, &p.running_mean, &p.running_var}) {
    if (t->rank() != 1 || t->dim(0) != c) {
      throw ShapeError("batchnorm: parameter length " + shape_to_string(t->shape()) +
                       " does not match " + std::to_string(c) + " channels");
    }
  }
  if (!(p.epsilon >= 0.0f)) throw ContractError("batchnorm: epsilon must be non-negative");
  std::vector<float> scale(c);
  std::vector<float> shift(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double var = p.running_var[ch];
    if (var < 0.0) throw ContractError("batchnorm: running variance must be non-negative");
    const double denom = std::sqrt(var + static_cast<double>(p.epsilon));
    if (denom == 0.0) throw ContractError("batchnorm: variance + epsilon is zero");
    const double s = static_cast<double>(p.gamma[ch]) / denom;
    scale[ch] = static_cast<float>(s);
    shift[ch] = static_cast<float>(p.beta[ch] - s * p.running_mean[ch]);
  }
  auto out = input;
  auto data = out.mutable_data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t ch = i % c;
    data[i] = data[i] * scale[ch] + shift[ch];
  }
  return out;
}

inline Tensor sigmoid(const Tensor& logits) {
  auto out = logits;
  for (float& v : out.mutable_data()) {
    v = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
  }
  return out;
}

/// Softmax over all elements, shifted by the maximum for stability.
inline Tensor softmax(const Tensor& logits) {
  auto out = logits;
  auto data = out.mutable_data();
  const float peak = *std::max_element(data.begin(), data.end());
  double sum = 0.0;
  std::vector<double> e(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    e[i] = std::exp(static_cast<double>(data[i]) - peak);
    sum += e[i];
  }
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(e[i] / sum);
  return out;
}

inline Tensor flatten(const Tensor& input) { return input.reshaped({input.size()}); }
inline Tensor flatten(Tensor&& input) {
  const auto n = input.size();
  return std::move(input).reshaped({n});
}

/// Fully connected map: weights are features x outputs, row-major.
inline Tensor dense(const Tensor& features, const Tensor& weights, const Tensor& bias,
                    MacCounter* counter = nullptr) {
  const std::size_t f = features.size();
  if (weights.rank() != 2 || weights.dim(0) != f) {
    throw ShapeError("dense: weights " + shape_to_string(weights.shape()) +
                     " do not accept " + std::to_string(f) + " features");
  }
  const std::size_t o = weights.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != o) throw ShapeError("dense: bias length mismatch");
  auto out = Tensor::zeros({o});
  for (std::size_t j = 0; j < o; ++j) {
    double acc = bias[j];
    for (std::size_t i = 0; i < f; ++i) {
      acc += static_cast<double>(features[i]) * static_cast<double>(weights[i * o + j]);
    }
    out[j] = static_cast<float>(acc);
  }
  if (counter) counter->macs += static_cast<std::uint64_t>(f) * o;
  return out;
}

}  // namespace lwcnn
