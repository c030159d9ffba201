#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lwcnn/ops.hpp"
#include "lwcnn/tensor.hpp"

namespace lwcnn {

enum class LayerKind : std::uint8_t {
  Conv = 0,
  DepthwiseSeparable = 1,
  Bottleneck = 2,
  MaxPool = 3,
  AvgPool = 4,
  Dropout = 5,
  Flatten = 6,
  Classifier = 7,
};

enum class ClassifierKind : std::uint8_t { None = 0, Sigmoid = 1, Softmax = 2 };

inline std::string_view kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::DepthwiseSeparable: return "dsc";
    case LayerKind::Bottleneck: return "bottleneck";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::AvgPool: return "avgpool";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Classifier: return "classifier";
  }
  return "?";
}

inline bool has_weights(LayerKind kind) {
  return kind == LayerKind::Conv || kind == LayerKind::DepthwiseSeparable ||
         kind == LayerKind::Bottleneck || kind == LayerKind::Classifier;
}

// Convolution-like layers: what the model's "N layers" count refers to.
inline bool is_conv_like(LayerKind kind) {
  return kind == LayerKind::Conv || kind == LayerKind::DepthwiseSeparable ||
         kind == LayerKind::Bottleneck;
}

/// One entry of a sequential model. For DepthwiseSeparable, kernel/stride/padding
/// describe the depthwise stage; the pointwise stage is always 1x1 stride 1.
/// in/out channels are unused (0) for pooling, dropout and flatten. For Classifier,
/// in_channels is the flattened feature count and out_channels the number of outputs.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::uint32_t kernel = 1;
  std::uint32_t stride = 1;
  Padding padding = Padding::Same;
  std::uint32_t in_channels = 0;
  std::uint32_t out_channels = 0;
  bool has_batchnorm = false;
  bool has_relu = false;
  ClassifierKind classifier = ClassifierKind::None;
  float bn_epsilon = 1e-3f;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ModelGraph {
  std::string name;
  Shape input_shape;  // H, W, C
  std::vector<LayerSpec> layers;
  std::string note;  // caveats carried into cost reports

  friend bool operator==(const ModelGraph&, const ModelGraph&) = default;

  std::size_t conv_layer_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += is_conv_like(l.kind) ? 1 : 0;
    return n;
  }

  const LayerSpec& layer(std::string_view name) const {
    for (const auto& l : layers) {
      if (l.name == name) return l;
    }
    throw LookupError("no layer named '" + std::string(name) + "'");
  }
};

// ---------------------------------------------------------------------------
// Layer constructors

inline LayerSpec conv_layer(std::string name, std::uint32_t kernel, std::uint32_t in,
                            std::uint32_t out, std::uint32_t stride = 1,
                            Padding padding = Padding::Same, bool bn = true, bool relu = true) {
  return {std::move(name), LayerKind::Conv, kernel, stride, padding, in, out, bn, relu};
}

inline LayerSpec dsc_layer_spec(std::string name, std::uint32_t kernel, std::uint32_t in,
                                std::uint32_t out, std::uint32_t stride = 1,
                                Padding padding = Padding::Same, bool bn = true,
                                bool relu = true) {
  return {std::move(name), LayerKind::DepthwiseSeparable, kernel, stride, padding, in, out, bn,
          relu};
}

inline LayerSpec bottleneck_layer(std::string name, std::uint32_t in, std::uint32_t out,
                                  bool relu = true) {
  return {std::move(name), LayerKind::Bottleneck, 1, 1, Padding::Same, in, out, false, relu};
}

inline LayerSpec maxpool_layer(std::string name) {
  return {std::move(name), LayerKind::MaxPool, 2, 2, Padding::Valid};
}

inline LayerSpec avgpool_layer(std::string name, std::uint32_t kernel, std::uint32_t stride = 1) {
  return {std::move(name), LayerKind::AvgPool, kernel, stride, Padding::Valid};
}

inline LayerSpec dropout_layer(std::string name) {
  return {std::move(name), LayerKind::Dropout};
}

inline LayerSpec flatten_layer(std::string name = "flatten") {
  return {std::move(name), LayerKind::Flatten};
}

inline LayerSpec classifier_layer(std::string name, std::uint32_t features, std::uint32_t outputs,
                                  ClassifierKind kind) {
  LayerSpec l{std::move(name), LayerKind::Classifier, 1, 1, Padding::Valid, features, outputs};
  l.classifier = kind;
  return l;
}

// ---------------------------------------------------------------------------
// Shape inference

/// Output shape of every layer, in order. Throws GraphError naming the failing layer.
inline std::vector<Shape> infer_shapes(const ModelGraph& g) {
  if (g.input_shape.size() != 3) {
    throw GraphError("model input must be HxWxC, got " + shape_to_string(g.input_shape));
  }
  try {
    check_shape(g.input_shape);
  } catch (const ShapeError& e) {
    throw GraphError(std::string("model input: ") + e.what());
  }

  std::vector<Shape> shapes;
  shapes.reserve(g.layers.size());
  Shape cur = g.input_shape;
  std::string producer = "input";

  auto fail = [](const LayerSpec& l, const std::string& why) -> GraphError {
    return GraphError("layer '" + l.name + "': " + why);
  };
  auto need_spatial = [&](const LayerSpec& l) {
    if (cur.size() != 3) {
      throw fail(l, "needs an HxWxC input but receives " + shape_to_string(cur) + " from '" +
                        producer + "'");
    }
  };
  auto need_channels = [&](const LayerSpec& l) {
    if (l.in_channels != cur[2]) {
      throw fail(l, "expects " + std::to_string(l.in_channels) + " input channels but '" +
                        producer + "' produces " + std::to_string(cur[2]));
    }
  };

  for (const auto& l : g.layers) {
    try {
      switch (l.kind) {
        case LayerKind::Conv:
        case LayerKind::DepthwiseSeparable:
        case LayerKind::Bottleneck: {
          need_spatial(l);
          need_channels(l);
          if (l.out_channels == 0) throw fail(l, "output channel count must be positive");
          const auto rows = axis_geometry(cur[0], l.kernel, l.stride, l.padding);
          const auto cols = axis_geometry(cur[1], l.kernel, l.stride, l.padding);
          cur = {rows.out, cols.out, l.out_channels};
          break;
        }
        case LayerKind::MaxPool:
          need_spatial(l);
          if (cur[0] < 2 || cur[1] < 2) {
            throw fail(l, "2x2 pooling needs at least 2x2 input, got " + shape_to_string(cur));
          }
          cur = {cur[0] / 2, cur[1] / 2, cur[2]};
          break;
        case LayerKind::AvgPool: {
          need_spatial(l);
          const auto rows = axis_geometry(cur[0], l.kernel, l.stride, Padding::Valid);
          const auto cols = axis_geometry(cur[1], l.kernel, l.stride, Padding::Valid);
          cur = {rows.out, cols.out, cur[2]};
          break;
        }
        case LayerKind::Dropout:
          break;
        case LayerKind::Flatten:
          cur = {shape_product(cur)};
          break;
        case LayerKind::Classifier:
          if (cur.size() != 1) {
            throw fail(l, "needs a flattened input but receives " + shape_to_string(cur));
          }
          if (l.in_channels != cur[0]) {
            throw fail(l, "expects " + std::to_string(l.in_channels) + " features but '" +
                              producer + "' produces " + std::to_string(cur[0]));
          }
          if (l.out_channels == 0) throw fail(l, "output count must be positive");
          cur = {l.out_channels};
          break;
      }
    } catch (const ShapeError& e) {
      throw fail(l, e.what());
    }
    if (l.kind != LayerKind::Dropout) producer = l.name;
    shapes.push_back(cur);
  }
  return shapes;
}

/// Shape entering each layer (the graph input for layer 0).
inline std::vector<Shape> infer_input_shapes(const ModelGraph& g) {
  const auto outs = infer_shapes(g);
  std::vector<Shape> ins;
  ins.reserve(outs.size());
  ins.push_back(g.input_shape);
  for (std::size_t i = 0; i + 1 < outs.size(); ++i) ins.push_back(outs[i]);
  return ins;
}

/// Copy of g with a new input shape. Input channels of each convolution follow the
/// previous layer and classifier feature counts follow the flattened size.
inline ModelGraph with_input_shape(ModelGraph g, Shape input_shape) {
  g.input_shape = std::move(input_shape);
  if (g.input_shape.size() != 3) throw GraphError("input shape must be HxWxC");
  std::uint32_t channels = static_cast<std::uint32_t>(g.input_shape[2]);
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    auto& l = g.layers[i];
    if (is_conv_like(l.kind)) {
      l.in_channels = channels;
      channels = l.out_channels;
    } else if (l.kind == LayerKind::Classifier && i > 0) {
      ModelGraph prefix{g.name, g.input_shape, {g.layers.begin(), g.layers.begin() + i}, {}};
      l.in_channels = static_cast<std::uint32_t>(shape_product(infer_shapes(prefix).back()));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const ModelGraph& g) {
  ValidationReport report;
  auto flag = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (g.layers.empty()) {
    flag("graph has no layers");
    return report;
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const auto& l = g.layers[i];
    const std::string where = "layer '" + l.name + "'";
    if (l.name.empty()) flag("layer #" + std::to_string(i + 1) + " has an empty name");
    if (!seen.insert(l.name).second) flag("duplicate layer name '" + l.name + "'");
    if (l.name.find_first_of(" \t\r\n.") != std::string::npos) {
      flag(where + ": names may not contain whitespace or '.'");
    }
    if (l.kernel == 0 || l.stride == 0) flag(where + ": kernel and stride must be positive");
    if (l.has_batchnorm && !(l.bn_epsilon > 0.0f)) flag(where + ": batch-norm epsilon must be > 0");
    if ((l.kind == LayerKind::Classifier) != (l.classifier != ClassifierKind::None)) {
      flag(where + ": classifier kind must be set exactly on classifier layers");
    }
    if (l.has_batchnorm && !is_conv_like(l.kind)) {
      flag(where + ": batch-norm only applies to convolution layers");
    }

    if (l.kind == LayerKind::Bottleneck) {
      if (l.kernel != 1) {
        flag(where + ": bottleneck kernels must be 1x1, got " + std::to_string(l.kernel) + "x" +
             std::to_string(l.kernel));
      }
      if (l.has_batchnorm) flag(where + ": bottleneck layer must not use batch-norm");
      if (i + 1 < g.layers.size()) {
        const auto next = g.layers[i + 1].kind;
        if (next == LayerKind::MaxPool || next == LayerKind::AvgPool ||
            next == LayerKind::Dropout) {
          flag(where + ": bottleneck layer must not be followed by pooling or dropout");
        }
      }
    }
    if (l.kind == LayerKind::MaxPool && (l.kernel != 2 || l.stride != 2)) {
      flag(where + ": max pooling supports only kernel 2 stride 2");
    }
  }

  std::size_t flattens = 0;
  for (const auto& l : g.layers) flattens += l.kind == LayerKind::Flatten ? 1 : 0;
  const auto n = g.layers.size();
  if (g.layers.back().kind != LayerKind::Classifier) {
    flag("final layer must be a classifier, found '" + g.layers.back().name + "'");
  }
  if (flattens != 1) {
    flag("graph must contain exactly one flatten layer, found " + std::to_string(flattens));
  } else if (n < 2 || g.layers[n - 2].kind != LayerKind::Flatten) {
    flag("flatten must sit immediately before the classifier");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (g.layers[i].kind == LayerKind::Classifier) {
      flag("layer '" + g.layers[i].name + "': classifier must be the final layer");
    }
  }

  try {
    infer_shapes(g);
  } catch (const GraphError& e) {
    flag(e.what());
  }
  return report;
}

inline void require_valid(const ModelGraph& g) {
  const auto report = validate(g);
  if (!report.ok()) {
    std::string msg = "graph '" + g.name + "' is invalid:";
    for (const auto& v : report.violations) msg += "\n  - " + v;
    throw GraphError(msg);
  }
}

// ---------------------------------------------------------------------------
// Weight naming

/// Tensor roles per layer kind, keyed "<layer>.<role>".
struct TensorSpec {
  std::string name;
  Shape shape;
};

inline std::string weight_key(std::string_view layer, std::string_view role) {
  std::string key(layer);
  key += '.';
  key += role;
  return key;
}

/// Every tensor a graph needs, in layer order, with shapes from shape inference.
inline std::vector<TensorSpec> expected_tensors(const ModelGraph& g) {
  const auto ins = infer_input_shapes(g);
  std::vector<TensorSpec> out;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const auto& l = g.layers[i];
    const std::size_t k = l.kernel;
    const std::size_t m = l.in_channels;
    const std::size_t n = l.out_channels;
    switch (l.kind) {
      case LayerKind::Conv:
      case LayerKind::Bottleneck:
        out.push_back({weight_key(l.name, "w"), {k, k, m, n}});
        out.push_back({weight_key(l.name, "b"), {n}});
        break;
      case LayerKind::DepthwiseSeparable:
        out.push_back({weight_key(l.name, "dw_w"), {k, k, m}});
        out.push_back({weight_key(l.name, "dw_b"), {m}});
        out.push_back({weight_key(l.name, "pw_w"), {1, 1, m, n}});
        out.push_back({weight_key(l.name, "pw_b"), {n}});
        break;
      case LayerKind::Classifier:
        out.push_back({weight_key(l.name, "w"), {ins[i][0], n}});
        out.push_back({weight_key(l.name, "b"), {n}});
        break;
      default:
        break;
    }
    if (l.has_batchnorm && is_conv_like(l.kind)) {
      for (const char* role : {"bn_gamma", "bn_beta", "bn_mean", "bn_var"}) {
        out.push_back({weight_key(l.name, role), {n}});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference architectures

/// The 10-layer detector: three 3x3 convolutions, five depthwise-separable layers,
/// a 1x1 bottleneck and a final 7x7 valid depthwise-separable layer. Pooling follows
/// layers 3, 5, 6, 7 and 8; dropout (identity at inference) follows layers 1-8.
inline ModelGraph build_proposed(ClassifierKind classifier = ClassifierKind::Sigmoid) {
  ModelGraph g{"proposed", {224, 224, 3}, {}, {}};
  auto& L = g.layers;
  auto pool_and_drop = [&](int idx, bool pool) {
    if (pool) L.push_back(maxpool_layer("pool" + std::to_string(idx)));
    L.push_back(dropout_layer("drop" + std::to_string(idx)));
  };
  L.push_back(conv_layer("layer1", 3, 3, 64));
  pool_and_drop(1, false);
  L.push_back(conv_layer("layer2", 3, 64, 64));
  pool_and_drop(2, false);
  L.push_back(conv_layer("layer3", 3, 64, 64));
  pool_and_drop(3, true);
  L.push_back(dsc_layer_spec("layer4", 3, 64, 64));
  pool_and_drop(4, false);
  L.push_back(dsc_layer_spec("layer5", 3, 64, 64));
  pool_and_drop(5, true);
  L.push_back(dsc_layer_spec("layer6", 3, 64, 128));
  pool_and_drop(6, true);
  L.push_back(dsc_layer_spec("layer7", 3, 128, 128));
  pool_and_drop(7, true);
  L.push_back(dsc_layer_spec("layer8", 3, 128, 512));
  pool_and_drop(8, true);
  L.push_back(bottleneck_layer("layer9", 512, 128));
  L.push_back(dsc_layer_spec("layer10", 7, 128, 512, 1, Padding::Valid));
  L.push_back(flatten_layer());
  const bool sigmoid = classifier != ClassifierKind::Softmax;
  L.push_back(classifier_layer("classifier", 512, sigmoid ? 1 : 2,
                               sigmoid ? ClassifierKind::Sigmoid : ClassifierKind::Softmax));
  return g;
}

/// Ablation variant: the three leading 3x3 convolutions become one 7x7 convolution and
/// layers 4-5 become one depthwise-separable layer with a 5x5 depthwise kernel.
inline ModelGraph build_ablation(ClassifierKind classifier = ClassifierKind::Sigmoid) {
  ModelGraph g{"ablation", {224, 224, 3}, {}, {}};
  auto& L = g.layers;
  auto pool_and_drop = [&](int idx) {
    L.push_back(maxpool_layer("pool" + std::to_string(idx)));
    L.push_back(dropout_layer("drop" + std::to_string(idx)));
  };
  L.push_back(conv_layer("layer1", 7, 3, 64));
  pool_and_drop(1);
  L.push_back(dsc_layer_spec("layer2", 5, 64, 64));
  pool_and_drop(2);
  L.push_back(dsc_layer_spec("layer3", 3, 64, 128));
  pool_and_drop(3);
  L.push_back(dsc_layer_spec("layer4", 3, 128, 128));
  pool_and_drop(4);
  L.push_back(dsc_layer_spec("layer5", 3, 128, 512));
  pool_and_drop(5);
  L.push_back(bottleneck_layer("layer6", 512, 128));
  L.push_back(dsc_layer_spec("layer7", 7, 128, 512, 1, Padding::Valid));
  L.push_back(flatten_layer());
  const bool sigmoid = classifier != ClassifierKind::Softmax;
  L.push_back(classifier_layer("classifier", 512, sigmoid ? 1 : 2,
                               sigmoid ? ClassifierKind::Sigmoid : ClassifierKind::Softmax));
  return g;
}

namespace detail {

struct DscStep {
  std::uint32_t in, out, stride;
};

inline ModelGraph build_mobilenet_family(std::string name, std::uint32_t stem,
                                         const std::vector<DscStep>& steps,
                                         std::uint32_t classes, std::string note) {
  ModelGraph g{std::move(name), {224, 224, 3}, {}, std::move(note)};
  auto& L = g.layers;
  L.push_back(conv_layer("conv1", 3, 3, stem, 2));
  int idx = 2;
  for (const auto& s : steps) {
    L.push_back(dsc_layer_spec("dsc" + std::to_string(idx++), 3, s.in, s.out, s.stride));
  }
  L.push_back(avgpool_layer("avgpool", 7, 1));
  L.push_back(flatten_layer());
  L.push_back(classifier_layer("classifier", steps.back().out, classes, ClassifierKind::Softmax));
  return g;
}

inline std::vector<DscStep> mobilenet_steps(std::uint32_t base) {
  // base = channels of the stem convolution (32 for MobileNet, 16 for L-CNN).
  const std::uint32_t c1 = base, c2 = base * 2, c4 = base * 4, c8 = base * 8, c16 = base * 16,
                      c32 = base * 32;
  std::vector<DscStep> s;
  s.push_back({c1, c2, 1});
  s.push_back({c2, c4, 2});
  s.push_back({c4, c4, 1});
  s.push_back({c4, c8, 2});
  s.push_back({c8, c8, 1});
  s.push_back({c8, c16, 2});
  for (int i = 0; i < 5; ++i) s.push_back({c16, c16, 1});
  s.push_back({c16, c32, 2});
  s.push_back({c32, c32, 1});
  return s;
}

}  // namespace detail

/// MobileNet as tabulated for comparison: 3x3 stride-2 stem, 13 depthwise-separable
/// blocks, 7x7 average pool and a 1000-way fully connected softmax head.
inline ModelGraph build_mobilenet() {
  return detail::build_mobilenet_family("mobilenet", 32, detail::mobilenet_steps(32), 1000,
                                        "last depthwise stage uses stride 1 so the 7x7 average "
                                        "pool receives a 7x7 map");
}

/// L-CNN: MobileNet topology with narrower layers (16 stem filters, 256 at the top).
inline ModelGraph build_lcnn() {
  // Pointwise widths follow the published table: 16,16,32,32,64,64,128,...,256,256.
  std::vector<detail::DscStep> s = {{16, 16, 1},  {16, 32, 2},   {32, 32, 1},
                                    {32, 64, 2},  {64, 64, 1},   {64, 128, 2}};
  for (int i = 0; i < 5; ++i) s.push_back({128, 128, 1});
  s.push_back({128, 256, 2});
  s.push_back({256, 256, 1});
  return detail::build_mobilenet_family(
      "lcnn", 16, s, 2,
      "regression head approximated as a single fully connected 256->2 layer for counting");
}

inline const std::vector<std::string>& builtin_architectures() {
  static const std::vector<std::string> names = {"proposed", "ablation", "mobilenet", "lcnn"};
  return names;
}

inline ModelGraph build_architecture(std::string_view name) {
  if (name == "proposed") return build_proposed();
  if (name == "ablation") return build_ablation();
  if (name == "mobilenet") return build_mobilenet();
  if (name == "lcnn") return build_lcnn();
  std::string valid;
  for (const auto& n : builtin_architectures()) valid += (valid.empty() ? "" : ", ") + n;
  throw GraphError("unknown architecture '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace lwcnn
