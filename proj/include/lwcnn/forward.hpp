#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "lwcnn/graph.hpp"
#include "lwcnn/ops.hpp"

namespace lwcnn {

/// Named tensors keyed "<layer>.<role>".
using WeightStore = std::map<std::string, Tensor, std::less<>>;

enum class ConvBackend {
  Fast,    // loop-reordered kernels
  Direct,  // reference conv2d_direct for every convolution
};

struct ForwardOptions {
  ConvBackend backend = ConvBackend::Fast;
  MacCounter* counter = nullptr;  // only the Direct backend counts
  // Called after each layer with its index and output.
  std::function<void(std::size_t, const LayerSpec&, const Tensor&)> on_layer;
};

inline const Tensor& lookup_weight(const WeightStore& store, std::string_view key,
                                   const Shape& expected) {
  const auto it = store.find(key);
  if (it == store.end()) throw LookupError("missing weight '" + std::string(key) + "'");
  if (it->second.shape() != expected) {
    throw LookupError("weight '" + std::string(key) + "' has shape " +
                      shape_to_string(it->second.shape()) + ", expected " +
                      shape_to_string(expected));
  }
  return it->second;
}

/// Throws LookupError for the first tensor the graph needs that the store lacks or mis-shapes.
inline void check_weights(const ModelGraph& g, const WeightStore& store) {
  for (const auto& spec : expected_tensors(g)) lookup_weight(store, spec.name, spec.shape);
}

namespace detail {

inline const Tensor& get(const WeightStore& s, const LayerSpec& l, std::string_view role) {
  const auto it = s.find(weight_key(l.name, role));
  return it->second;  // presence checked up front by check_weights
}

inline Tensor apply_layer(const LayerSpec& l, const WeightStore& w, const Tensor& x,
                          const ForwardOptions& opt) {
  const bool direct = opt.backend == ConvBackend::Direct;
  Tensor y = [&]() -> Tensor {
    switch (l.kind) {
      case LayerKind::Conv:
      case LayerKind::Bottleneck: {
        const ConvWeights cw{get(w, l, "w"), get(w, l, "b")};
        return direct ? conv2d_direct(x, cw, l.stride, l.padding, opt.counter)
                      : conv2d(x, cw, l.stride, l.padding);
      }
      case LayerKind::DepthwiseSeparable: {
        const DepthwiseWeights dw{get(w, l, "dw_w"), get(w, l, "dw_b")};
        const ConvWeights pw{get(w, l, "pw_w"), get(w, l, "pw_b")};
        return direct ? dsc_layer_direct(x, dw, pw, l.stride, l.padding, opt.counter)
                      : dsc_layer(x, dw, pw, l.stride, l.padding);
      }
      case LayerKind::MaxPool:
        return maxpool2(x);
      case LayerKind::AvgPool:
        return avgpool(x, l.kernel, l.stride);
      case LayerKind::Dropout:
        return x;
      case LayerKind::Flatten:
        return flatten(x);
      case LayerKind::Classifier: {
        const auto logits = dense(x, get(w, l, "w"), get(w, l, "b"), direct ? opt.counter : nullptr);
        return l.classifier == ClassifierKind::Softmax ? softmax(logits) : sigmoid(logits);
      }
    }
    throw GraphError("layer '" + l.name + "': unknown kind");
  }();
  if (l.has_batchnorm && is_conv_like(l.kind)) {
    const BatchNormParams bn{get(w, l, "bn_gamma"), get(w, l, "bn_beta"), get(w, l, "bn_mean"),
                             get(w, l, "bn_var"), l.bn_epsilon};
    y = batchnorm_infer(y, bn);
  }
  if (l.has_relu) y = relu(y);
  return y;
}

}  // namespace detail

/// Runs the graph on one preprocessed HxWxC image and returns the classifier output
/// (a single probability for a sigmoid head, a distribution for softmax).
inline Tensor forward(const ModelGraph& g, const WeightStore& weights, const Tensor& image,
                      const ForwardOptions& options = {}) {
  require_valid(g);
  check_weights(g, weights);
  if (image.shape() != g.input_shape) {
    throw ShapeError("model '" + g.name + "' expects input " + shape_to_string(g.input_shape) +
                     ", got " + shape_to_string(image.shape()));
  }
  Tensor x = image;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    x = detail::apply_layer(g.layers[i], weights, x, options);
    if (options.on_layer) options.on_layer(i, g.layers[i], x);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Synthetic weights

/// 64-bit FNV-1a over the bytes of a tensor name.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Per-tensor seed for demo weights: the model seed XOR the FNV-1a hash of the tensor name.
inline std::uint64_t tensor_seed(std::uint64_t seed, std::string_view name) noexcept {
  return seed ^ fnv1a64(name);
}

/// Seeded stand-in weights for every tensor the graph needs. Kernels, biases, BN shift and
/// BN mean are uniform in [-0.05, 0.05); BN gamma and variance are uniform in [0.95, 1.05)
/// so variances stay positive. With zero = true everything is 0.
inline WeightStore demo_weights(const ModelGraph& g, std::uint64_t seed, bool zero = false) {
  WeightStore store;
  for (auto& spec : expected_tensors(g)) {
    Tensor t = [&] {
      if (zero) return Tensor::zeros(spec.shape);
      const bool unit = spec.name.ends_with(".bn_gamma") || spec.name.ends_with(".bn_var");
      const float lo = unit ? 0.95f : -0.05f;
      const float hi = unit ? 1.05f : 0.05f;
      return seeded_uniform(spec.shape, tensor_seed(seed, spec.name), lo, hi);
    }();
    store.emplace(std::move(spec.name), std::move(t));
  }
  return store;
}

}  // namespace lwcnn
