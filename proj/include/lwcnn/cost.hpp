#pragma once

#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lwcnn/graph.hpp"

namespace lwcnn {

/// Square convolution configuration: kernel D_k, channels M -> N, input extent D_f.
struct ConvCost {
  std::uint64_t kernel = 1;
  std::uint64_t in_channels = 1;
  std::uint64_t out_channels = 1;
  std::uint64_t input_size = 1;
  std::uint64_t stride = 1;

  // Output extent under same padding; equals input_size at stride 1.
  std::uint64_t output_size() const { return (input_size + stride - 1) / stride; }

  void check() const {
    if (!kernel || !in_channels || !out_channels || !input_size || !stride)
      throw RangeError("ConvCost fields must all be positive");
  }
};

/// Multiply-accumulates of a conventional convolution: D_k^2 * M * N * D_g^2.
inline std::uint64_t conv_macs(const ConvCost& c) {
  c.check();
  const auto out = c.output_size();
  return c.kernel * c.kernel * c.in_channels * c.out_channels * out * out;
}

/// Depthwise (D_k^2 * M * D_g^2) plus pointwise (N * M * D_g^2) multiply-accumulates.
inline std::uint64_t dsc_macs(const ConvCost& c) {
  c.check();
  const auto out = c.output_size();
  return c.kernel * c.kernel * c.in_channels * out * out +
         c.out_channels * c.in_channels * out * out;
}

/// Non-negative rational kept in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational make(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw RangeError("rational with zero denominator");
    const auto g = std::gcd(n, d);
    return g ? Rational{n / g, d / g} : Rational{0, 1};
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Cost of depthwise-separable relative to conventional convolution: 1/N + 1/D_k^2.
inline Rational dsc_ratio(std::uint64_t kernel, std::uint64_t out_channels) {
  if (!kernel || !out_channels) throw RangeError("dsc_ratio arguments must be positive");
  const auto k2 = kernel * kernel;
  return Rational::make(k2 + out_channels, out_channels * k2);
}

struct ParamCount {
  std::uint64_t weights = 0;
  std::uint64_t biases = 0;
  std::uint64_t batchnorm = 0;

  std::uint64_t total() const { return weights + biases + batchnorm; }
  ParamCount& operator+=(const ParamCount& o) {
    weights += o.weights;
    biases += o.biases;
    batchnorm += o.batchnorm;
    return *this;
  }
  friend bool operator==(const ParamCount&, const ParamCount&) = default;
};

/// Parameters owned by one layer, split into kernel weights, biases and batch-norm vectors.
/// Classifier layers use in_channels as the feature count.
inline ParamCount layer_params(const LayerSpec& l) {
  const std::uint64_t k2 = static_cast<std::uint64_t>(l.kernel) * l.kernel;
  const std::uint64_t m = l.in_channels;
  const std::uint64_t n = l.out_channels;
  ParamCount p;
  switch (l.kind) {
    case LayerKind::Conv:
    case LayerKind::Bottleneck:
      p.weights = k2 * m * n;
      p.biases = n;
      break;
    case LayerKind::DepthwiseSeparable:
      p.weights = k2 * m + m * n;
      p.biases = m + n;
      break;
    case LayerKind::Classifier:
      p.weights = m * n;
      p.biases = n;
      break;
    default:
      break;
  }
  if (l.has_batchnorm && is_conv_like(l.kind)) p.batchnorm = 4 * n;
  return p;
}

// ---------------------------------------------------------------------------
// Receptive field

struct RFStep {
  std::uint64_t kernel = 1;
  std::uint64_t stride = 1;
};
using RFChain = std::vector<RFStep>;

/// R_k = R_{k-1} + (f_k - 1) * prod_{i<k} s_i, starting from R_0 = 1.
inline std::uint64_t receptive_field(const RFChain& chain) {
  std::uint64_t rf = 1;
  std::uint64_t jump = 1;
  for (const auto& s : chain) {
    if (!s.kernel || !s.stride) throw RangeError("receptive field steps must be positive");
    rf += (s.kernel - 1) * jump;
    jump *= s.stride;
  }
  return rf;
}

enum class RFMode {
  ConvOnly,  // convolution kernels only
  WithPool,  // pooling windows count as (kernel, stride) steps too
};

/// RF step contributed by a layer, if any. Depthwise-separable layers contribute their
/// depthwise kernel; the 1x1 pointwise stage adds nothing.
inline std::optional<RFStep> rf_step(const LayerSpec& l, RFMode mode) {
  switch (l.kind) {
    case LayerKind::Conv:
    case LayerKind::DepthwiseSeparable:
    case LayerKind::Bottleneck:
      return RFStep{l.kernel, l.stride};
    case LayerKind::MaxPool:
    case LayerKind::AvgPool:
      if (mode == RFMode::WithPool) return RFStep{l.kernel, l.stride};
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

inline RFChain rf_chain(const ModelGraph& g, RFMode mode, std::size_t first = 0,
                        std::size_t last = static_cast<std::size_t>(-1)) {
  RFChain chain;
  for (std::size_t i = first; i < g.layers.size() && i < last; ++i) {
    if (auto s = rf_step(g.layers[i], mode)) chain.push_back(*s);
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Whole-model report

struct CostRow {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  Shape out_shape;
  ParamCount params;
  std::uint64_t macs = 0;
  std::uint64_t rf = 1;  // cumulative receptive field after this layer
};

struct CostReport {
  std::string model;
  Shape input_shape;
  RFMode rf_mode = RFMode::WithPool;
  std::vector<CostRow> rows;
  ParamCount params;
  std::uint64_t macs = 0;
  std::uint64_t receptive_field = 1;
  std::vector<std::string> notes;

  std::uint64_t total_params() const { return params.total(); }
  std::uint64_t weight_bytes() const { return 4 * params.total(); }
};

/// MACs of one layer given the shape entering it. Strided layers use the output extent.
inline std::uint64_t layer_macs(const LayerSpec& l, const Shape& in, const Shape& out) {
  const std::uint64_t k2 = static_cast<std::uint64_t>(l.kernel) * l.kernel;
  switch (l.kind) {
    case LayerKind::Conv:
    case LayerKind::Bottleneck:
      return k2 * l.in_channels * l.out_channels * out[0] * out[1];
    case LayerKind::DepthwiseSeparable:
      return k2 * l.in_channels * out[0] * out[1] +
             static_cast<std::uint64_t>(l.out_channels) * l.in_channels * out[0] * out[1];
    case LayerKind::Classifier:
      return static_cast<std::uint64_t>(in[0]) * l.out_channels;
    default:
      return 0;
  }
}

inline CostReport analyze_model(const ModelGraph& g, RFMode mode = RFMode::WithPool) {
  require_valid(g);
  const auto outs = infer_shapes(g);
  const auto ins = infer_input_shapes(g);
  CostReport r;
  r.model = g.name;
  r.input_shape = g.input_shape;
  r.rf_mode = mode;

  std::uint64_t rf = 1;
  std::uint64_t jump = 1;
  bool strided = false;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const auto& l = g.layers[i];
    if (auto s = rf_step(l, mode)) {
      rf += (s->kernel - 1) * jump;
      jump *= s->stride;
    }
    if (is_conv_like(l.kind) && l.stride > 1) strided = true;
    CostRow row{l.name, l.kind, outs[i], layer_params(l), layer_macs(l, ins[i], outs[i]), rf};
    r.params += row.params;
    r.macs += row.macs;
    r.rows.push_back(std::move(row));
  }
  r.receptive_field = rf;
  r.notes.push_back("MACs are multiply-accumulates, not FLOPs; batch-norm and pooling are not counted");
  if (strided) {
    r.notes.push_back("strided layers count MACs over the output extent instead of the input extent");
  }
  r.notes.push_back(mode == RFMode::ConvOnly ? "receptive field counts convolution kernels only"
                                             : "receptive field includes pooling windows");
  if (!g.note.empty()) r.notes.push_back(g.note);
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string kind_label(LayerKind k) { return std::string(kind_name(k)); }

inline std::string render_report_table(const CostReport& r) {
  std::ostringstream os;
  os << "model " << r.model << "  input " << shape_to_string(r.input_shape) << '\n';
  os << std::left << std::setw(12) << "layer" << std::setw(12) << "kind" << std::right
     << std::setw(14) << "out_shape" << std::setw(12) << "weights" << std::setw(9) << "bias"
     << std::setw(8) << "bn" << std::setw(12) << "params" << std::setw(15) << "macs"
     << std::setw(6) << "rf" << '\n';
  for (const auto& row : r.rows) {
    os << std::left << std::setw(12) << row.name << std::setw(12) << kind_label(row.kind)
       << std::right << std::setw(14) << shape_to_string(row.out_shape) << std::setw(12)
       << row.params.weights << std::setw(9) << row.params.biases << std::setw(8)
       << row.params.batchnorm << std::setw(12) << row.params.total() << std::setw(15)
       << row.macs << std::setw(6) << row.rf << '\n';
  }
  os << std::left << std::setw(38) << "total" << std::right << std::setw(12) << r.params.weights
     << std::setw(9) << r.params.biases << std::setw(8) << r.params.batchnorm << std::setw(12)
     << r.params.total() << std::setw(15) << r.macs << std::setw(6) << r.receptive_field << '\n';
  os << "weight payload: " << r.weight_bytes() << " bytes (" << std::fixed << std::setprecision(3)
     << static_cast<double>(r.weight_bytes()) / (1024.0 * 1024.0) << " MiB at 4 bytes/param)\n";
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  return os.str();
}

/// CSV with header layer,kind,out_shape,params,macs,rf.
inline std::string render_report_csv(const CostReport& r) {
  std::ostringstream os;
  os << "layer,kind,out_shape,params,macs,rf\n";
  for (const auto& row : r.rows) {
    os << row.name << ',' << kind_label(row.kind) << ',' << shape_to_string(row.out_shape) << ','
       << row.params.total() << ',' << row.macs << ',' << row.rf << '\n';
  }
  return os.str();
}

struct Comparison {
  std::vector<std::string> models;
  std::vector<std::uint64_t> weights;
  std::vector<std::uint64_t> params;
  std::vector<std::uint64_t> macs;
  std::vector<std::uint64_t> weight_bytes;
  std::vector<std::uint64_t> receptive_field;
};

inline Comparison compare_models(const std::vector<CostReport>& reports) {
  Comparison c;
  for (const auto& r : reports) {
    c.models.push_back(r.model);
    c.weights.push_back(r.params.weights);
    c.params.push_back(r.params.total());
    c.macs.push_back(r.macs);
    c.weight_bytes.push_back(r.weight_bytes());
    c.receptive_field.push_back(r.receptive_field);
  }
  return c;
}

inline std::string render_comparison(const Comparison& c) {
  std::ostringstream os;
  auto row = [&](const std::string& label, const auto& cells) {
    os << std::left << std::setw(16) << label << std::right;
    for (const auto& v : cells) os << std::setw(16) << v;
    os << '\n';
  };
  row("", c.models);
  row("weights", c.weights);
  row("params", c.params);
  row("macs", c.macs);
  std::vector<std::string> mb;
  for (auto b : c.weight_bytes) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << static_cast<double>(b) / (1024.0 * 1024.0);
    mb.push_back(s.str());
  }
  row("weight_MiB", mb);
  row("rf", c.receptive_field);
  return os.str();
}

}  // namespace lwcnn
