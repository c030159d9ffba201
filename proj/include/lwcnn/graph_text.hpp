#pragma once

// Plain-text architecture description, one statement per line:
//
//   # comment                      (also allowed after any statement)
//   name <identifier>              optional, defaults to "custom"
//   input <H> <W> <C>              required before the first layer
//   conv <K> <S> <N> [flags]       conventional KxK convolution to N channels
//   dsc <K> <S> <N> [flags]        depthwise KxK (stride S) then pointwise 1x1 to N
//   bottleneck <K> <S> <N> [flags] 1x1 compression layer (K must be 1 to validate)
//   maxpool                        2x2 stride 2
//   avgpool <K> <S>                KxK mean pooling, no padding
//   dropout                        identity at inference
//   flatten
//   classifier <N> sigmoid|softmax
//
// flags: same | valid | bn | relu | eps=<float> | name=<identifier>
// Input channels are implied by the previous layer. Unnamed layers are called
// <kind><line>, e.g. "conv4" for a conv statement on line 4.

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lwcnn/graph.hpp"

namespace lwcnn {

class GraphParseError : public GraphError {
 public:
  GraphParseError(std::size_t line, const std::string& msg)
      : GraphError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::istringstream is{std::string(line)};
  std::string w;
  while (is >> w) words.push_back(w);
  return words;
}

inline std::uint32_t parse_positive(const std::string& word, std::size_t line, const char* what) {
  std::uint32_t value = 0;
  const auto* end = word.data() + word.size();
  const auto [ptr, ec] = std::from_chars(word.data(), end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw GraphParseError(line, std::string(what) + " must be a positive integer, got '" + word +
                                    "'");
  }
  return value;
}

}  // namespace detail

inline ModelGraph parse_graph_text(std::istream& in) {
  ModelGraph g{"custom", {}, {}, {}};
  std::string raw;
  std::size_t line_no = 0;
  bool saw_input = false;

  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto words = detail::split_words(raw);
    if (words.empty()) continue;
    const std::string kw = words[0];
    auto arity = [&](std::size_t n) {
      if (words.size() < n + 1) {
        throw GraphParseError(line_no, "'" + kw + "' needs " + std::to_string(n) + " arguments");
      }
    };

    if (kw == "name") {
      arity(1);
      if (words.size() != 2) throw GraphParseError(line_no, "'name' takes one identifier");
      g.name = words[1];
      continue;
    }
    if (kw == "input") {
      arity(3);
      if (words.size() != 4) throw GraphParseError(line_no, "'input' takes exactly H W C");
      if (!g.layers.empty()) throw GraphParseError(line_no, "'input' must precede all layers");
      g.input_shape = {detail::parse_positive(words[1], line_no, "height"),
                       detail::parse_positive(words[2], line_no, "width"),
                       detail::parse_positive(words[3], line_no, "channels")};
      saw_input = true;
      continue;
    }
    if (!saw_input) throw GraphParseError(line_no, "'input H W C' must come before any layer");

    LayerSpec l;
    std::size_t first_flag = 1;
    if (kw == "conv" || kw == "dsc" || kw == "bottleneck") {
      arity(3);
      l.kind = kw == "conv"  ? LayerKind::Conv
               : kw == "dsc" ? LayerKind::DepthwiseSeparable
                             : LayerKind::Bottleneck;
      l.kernel = detail::parse_positive(words[1], line_no, "kernel");
      l.stride = detail::parse_positive(words[2], line_no, "stride");
      l.out_channels = detail::parse_positive(words[3], line_no, "channels");
      first_flag = 4;
    } else if (kw == "maxpool") {
      l = maxpool_layer("");
    } else if (kw == "avgpool") {
      arity(2);
      l = avgpool_layer("", detail::parse_positive(words[1], line_no, "kernel"),
                        detail::parse_positive(words[2], line_no, "stride"));
      first_flag = 3;
    } else if (kw == "dropout") {
      l = dropout_layer("");
    } else if (kw == "flatten") {
      l = flatten_layer("");
    } else if (kw == "classifier") {
      arity(2);
      l.kind = LayerKind::Classifier;
      l.padding = Padding::Valid;
      l.out_channels = detail::parse_positive(words[1], line_no, "outputs");
      if (words[2] == "sigmoid") {
        l.classifier = ClassifierKind::Sigmoid;
      } else if (words[2] == "softmax") {
        l.classifier = ClassifierKind::Softmax;
      } else {
        throw GraphParseError(line_no, "classifier kind must be sigmoid or softmax, got '" +
                                           words[2] + "'");
      }
      first_flag = 3;
    } else {
      throw GraphParseError(line_no, "unknown statement '" + kw + "'");
    }

    for (std::size_t i = first_flag; i < words.size(); ++i) {
      const auto& f = words[i];
      if (f == "same") {
        l.padding = Padding::Same;
      } else if (f == "valid") {
        l.padding = Padding::Valid;
      } else if (f == "bn") {
        l.has_batchnorm = true;
      } else if (f == "relu") {
        l.has_relu = true;
      } else if (f.starts_with("name=") && f.size() > 5) {
        l.name = f.substr(5);
      } else if (f.starts_with("eps=")) {
        try {
          std::size_t used = 0;
          l.bn_epsilon = std::stof(f.substr(4), &used);
          if (used != f.size() - 4) throw std::invalid_argument(f);
        } catch (const std::exception&) {
          throw GraphParseError(line_no, "bad epsilon '" + f + "'");
        }
      } else {
        throw GraphParseError(line_no, "unknown flag '" + f + "' for '" + kw + "'");
      }
    }
    if (l.name.empty()) l.name = kw + std::to_string(line_no);

    // Input channels come from whatever the graph produces so far.
    const auto prefix = infer_shapes(g);
    const Shape& cur = prefix.empty() ? g.input_shape : prefix.back();
    if (has_weights(l.kind)) l.in_channels = static_cast<std::uint32_t>(cur.back());
    g.layers.push_back(l);
    try {
      infer_shapes(g);
    } catch (const GraphError& e) {
      throw GraphParseError(line_no, e.what());
    }
  }
  if (!saw_input) throw GraphParseError(line_no, "missing 'input H W C' statement");
  if (g.layers.empty()) throw GraphParseError(line_no, "no layers declared");
  return g;
}

inline ModelGraph parse_graph_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_graph_text(is);
}

/// Text form that parse_graph_text reads back to an equal graph (the note is not kept).
inline std::string write_graph_text(const ModelGraph& g) {
  std::ostringstream os;
  os << "name " << g.name << '\n';
  os << "input " << g.input_shape.at(0) << ' ' << g.input_shape.at(1) << ' '
     << g.input_shape.at(2) << '\n';
  for (const auto& l : g.layers) {
    os << kind_name(l.kind);
    switch (l.kind) {
      case LayerKind::Conv:
      case LayerKind::DepthwiseSeparable:
      case LayerKind::Bottleneck:
        os << ' ' << l.kernel << ' ' << l.stride << ' ' << l.out_channels << ' '
           << (l.padding == Padding::Same ? "same" : "valid");
        if (l.has_batchnorm) os << " bn";
        if (l.has_relu) os << " relu";
        if (l.has_batchnorm && l.bn_epsilon != 1e-3f) os << " eps=" << std::setprecision(9) << l.bn_epsilon;
        break;
      case LayerKind::AvgPool:
        os << ' ' << l.kernel << ' ' << l.stride;
        break;
      case LayerKind::Classifier:
        os << ' ' << l.out_channels << ' '
           << (l.classifier == ClassifierKind::Sigmoid ? "sigmoid" : "softmax");
        break;
      default:
        break;
    }
    os << " name=" << l.name << '\n';
  }
  return os.str();
}

}  // namespace lwcnn
