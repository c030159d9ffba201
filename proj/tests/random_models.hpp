#pragma once

// Random small valid graphs and weight stores for property tests.

#include <bit>
#include <cstdint>
#include <string>

#include "lwcnn/forward.hpp"
#include "lwcnn/graph.hpp"

namespace lwcnn::randgen {

inline ModelGraph random_graph(SplitMix64& rng) {
  for (;;) {
    ModelGraph g;
    g.name = "rand" + std::to_string(rng.next() % 1000);
    if (rng.next() % 3 == 0) g.note = "note " + std::to_string(rng.next() % 97);
    g.input_shape = {4 + rng.next() % 9, 4 + rng.next() % 9, 1 + rng.next() % 4};
    std::uint32_t channels = static_cast<std::uint32_t>(g.input_shape[2]);
    const int count = 1 + static_cast<int>(rng.next() % 5);
    for (int i = 0; i < count; ++i) {
      const std::string name = "l" + std::to_string(i);
      const auto out = static_cast<std::uint32_t>(1 + rng.next() % 6);
      const bool prev_bottleneck = !g.layers.empty() && g.layers.back().kind == LayerKind::Bottleneck;
      LayerSpec l;
      switch (rng.next() % 6) {
        case 0:
        case 1:
          l = conv_layer(name, 1 + 2 * (rng.next() % 2), channels, out, 1 + rng.next() % 2,
                         Padding::Same, rng.next() % 2, rng.next() % 2);
          break;
        case 2:
        case 3:
          l = dsc_layer_spec(name, 1 + 2 * (rng.next() % 2), channels, out, 1 + rng.next() % 2,
                             Padding::Same, rng.next() % 2, rng.next() % 2);
          break;
        case 4:
          l = bottleneck_layer(name, channels, out, rng.next() % 2);
          break;
        default:
          if (prev_bottleneck) continue;
          l = rng.next() % 2 ? maxpool_layer(name) : dropout_layer(name);
          break;
      }
      if (l.has_batchnorm) l.bn_epsilon = 1e-5f + static_cast<float>(rng.next() % 1000) * 1e-5f;
      if (is_conv_like(l.kind)) channels = l.out_channels;
      g.layers.push_back(l);
    }
    if (g.layers.empty()) continue;
    g.layers.push_back(flatten_layer("flat"));
    const bool softmax = rng.next() % 2;
    g.layers.push_back(classifier_layer("head", 1, softmax ? 2 : 1,
                                        softmax ? ClassifierKind::Softmax : ClassifierKind::Sigmoid));
    try {
      const auto shapes = infer_shapes(g);
      g.layers.back().in_channels = static_cast<std::uint32_t>(shapes[shapes.size() - 2][0]);
    } catch (const GraphError&) {
      continue;
    }
    if (validate(g).ok()) return g;
  }
}

// Arbitrary bit patterns, NaNs and infinities included.
inline WeightStore random_weights(const ModelGraph& g, SplitMix64& rng) {
  WeightStore store;
  for (const auto& spec : expected_tensors(g)) {
    auto t = Tensor::zeros(spec.shape);
    for (float& v : t.mutable_data()) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next()));
    store.emplace(spec.name, std::move(t));
  }
  return store;
}

}  // namespace lwcnn::randgen
