#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "lwcnn/lwcnn.hpp"

namespace lwcnn::cli {
namespace {

namespace fs = std::filesystem;

// "224x224x3" / "128x64" -> dimension list with the requested arity.
Shape parse_dims(const std::string& text, std::size_t arity, const char* flag) {
  Shape dims;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('x', start), text.size());
    std::size_t v = 0;
    const auto* b = text.data() + start;
    const auto* e = text.data() + end;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || v == 0) break;
    dims.push_back(v);
    start = end + 1;
  }
  if (dims.size() != arity) {
    throw ContractError(std::string(flag) + " expects " + (arity == 3 ? "HxWxC" : "HxW") +
                        ", got '" + text + "'");
  }
  return dims;
}

RFMode parse_rf_mode(const std::string& s) {
  return s == "conv-only" ? RFMode::ConvOnly : RFMode::WithPool;
}

ModelGraph load_architecture(const std::string& arch, const std::string& path) {
  if (arch == "file") {
    if (path.empty()) throw ContractError("'file' needs a path to an architecture description");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_graph_text(in);
  }
  return build_architecture(arch);
}

void apply_input_size(ModelGraph& g, const std::string& input_size) {
  if (input_size.empty()) return;
  g = with_input_shape(std::move(g), parse_dims(input_size, 3, "--input-size"));
}

std::vector<std::byte> read_bytes(const std::string& path) { return detail::read_all(path); }

struct Options {
  // analyze / compare
  std::string arch;
  std::string path;
  std::vector<std::string> archs;
  std::string input_size;
  std::string rf_mode = "with-pool";
  std::string format = "table";
  // demo
  std::uint64_t seed = 42;
  std::string out;
  bool zero = false;
  // infer / convert
  std::string model;
  std::string image;
  bool no_stretch = false;
  bool direct = false;
  bool stretch = false;
  std::string resize;
  // bench
  std::string kernel;
  std::size_t dk = 3, m = 32, n = 64, df = 56;
  std::size_t iters = 30;
  std::size_t warmup = 3;
};

int cmd_analyze(const Options& o, std::ostream& out) {
  auto g = load_architecture(o.arch, o.path);
  apply_input_size(g, o.input_size);
  const auto report = analyze_model(g, parse_rf_mode(o.rf_mode));
  out << (o.format == "csv" ? render_report_csv(report) : render_report_table(report));
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  std::vector<CostReport> reports;
  for (const auto& a : o.archs) {
    reports.push_back(analyze_model(build_architecture(a), parse_rf_mode(o.rf_mode)));
  }
  out << render_comparison(compare_models(reports));
  return kExitOk;
}

int cmd_demo(const Options& o, std::ostream& out) {
  auto g = load_architecture(o.arch, o.path);
  apply_input_size(g, o.input_size);
  require_valid(g);
  const auto weights = demo_weights(g, o.seed, o.zero);
  const auto bytes = serialize_to_bytes(g, weights);
  detail::write_all(o.out, bytes);
  std::uint64_t payload = 0;
  for (const auto& [name, t] : weights) payload += 4 * t.size();
  out << "wrote " << o.out << ": " << bytes.size() << " bytes, " << weights.size()
      << " tensors, payload " << payload << " bytes\n";
  return kExitOk;
}

// Image -> model input: optional contrast stretch, bilinear resize to the model's
// spatial size, then division by 255.
Tensor prepare_input(const Tensor& image, const Shape& input_shape, bool stretch) {
  if (image.channels() != input_shape[2]) {
    throw ShapeError("image has " + std::to_string(image.channels()) + " channels, model expects " +
                     std::to_string(input_shape[2]));
  }
  Tensor x = stretch ? contrast_stretch(image) : image;
  x = bilinear_resize(x, input_shape[0], input_shape[1]);
  return scale_to_unit(x);
}

int cmd_infer(const Options& o, std::ostream& out) {
  const auto model = deserialize(read_bytes(o.model));
  const auto image = read_pnm(read_bytes(o.image));
  const auto input = prepare_input(image, model.graph.input_shape, !o.no_stretch);
  ForwardOptions fo;
  fo.backend = o.direct ? ConvBackend::Direct : ConvBackend::Fast;
  const auto result = forward(model.graph, model.weights, input, fo);
  // Sigmoid heads emit one probability; for softmax heads class 1 is "human".
  const float prob = result.size() == 1 ? result[0] : result[1];
  out << "human_prob=" << std::setprecision(9) << prob << '\n';
  return kExitOk;
}

int cmd_convert(const Options& o, std::ostream& out) {
  auto t = read_pnm(read_bytes(o.image));
  if (o.stretch) t = contrast_stretch(t);
  if (!o.resize.empty()) {
    const auto hw = parse_dims(o.resize, 2, "--resize");
    t = bilinear_resize(t, hw[0], hw[1]);
  }
  write_raw_file(t, o.out);
  out << "wrote " << o.out << ": " << shape_to_string(t.shape()) << '\n';
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  std::vector<BenchResult> results;
  if (!o.model.empty()) {
    const auto model = deserialize(read_bytes(o.model));
    const auto input = seeded_uniform(model.graph.input_shape, o.seed, 0.0f, 1.0f);
    auto whole = run_bench(model.graph.name + " forward", o.warmup, o.iters,
                           [&] { forward(model.graph, model.weights, input); });

    const auto& layers = model.graph.layers;
    std::vector<std::vector<double>> per_layer(layers.size());
    using clock = std::chrono::steady_clock;
    for (std::size_t it = 0; it < o.warmup + o.iters; ++it) {
      auto last = clock::now();
      ForwardOptions fo;
      fo.on_layer = [&](std::size_t i, const LayerSpec&, const Tensor&) {
        const auto now = clock::now();
        if (it >= o.warmup) {
          per_layer[i].push_back(std::chrono::duration<double, std::milli>(now - last).count());
        }
        last = clock::now();
      };
      forward(model.graph, model.weights, input, fo);
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      whole.layers.push_back({layers[i].name, median_of(per_layer[i])});
    }
    results.push_back(std::move(whole));
  } else {
    if (o.kernel != "conv" && o.kernel != "dsc") {
      throw ContractError("bench needs --model or --kernel conv|dsc");
    }
    const auto input = seeded_uniform({o.df, o.df, o.m}, o.seed, -1.0f, 1.0f);
    const ConvCost cost{o.dk, o.m, o.n, o.df, 1};
    std::ostringstream label;
    label << o.kernel << " k" << o.dk << " " << o.m << "->" << o.n << " @" << o.df;
    if (o.kernel == "conv") {
      const ConvWeights w{seeded_uniform({o.dk, o.dk, o.m, o.n}, o.seed + 1, -0.1f, 0.1f),
                          seeded_uniform({o.n}, o.seed + 2, -0.1f, 0.1f)};
      results.push_back(run_bench(label.str(), o.warmup, o.iters,
                                  [&] { conv2d(input, w, 1, Padding::Same); }));
      out << "macs " << conv_macs(cost) << '\n';
    } else {
      const DepthwiseWeights dw{seeded_uniform({o.dk, o.dk, o.m}, o.seed + 1, -0.1f, 0.1f),
                                seeded_uniform({o.m}, o.seed + 2, -0.1f, 0.1f)};
      const ConvWeights pw{seeded_uniform({1, 1, o.m, o.n}, o.seed + 3, -0.1f, 0.1f),
                           seeded_uniform({o.n}, o.seed + 4, -0.1f, 0.1f)};
      results.push_back(run_bench(label.str(), o.warmup, o.iters,
                                  [&] { dsc_layer(input, dw, pw, 1, Padding::Same); }));
      out << "macs " << dsc_macs(cost) << '\n';
    }
  }
  out << render_bench(results);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lightweight CNN inference runtime and architecture cost analyzer", "lwcnn"};
  app.require_subcommand(1);
  Options o;

  std::string arch_names;
  for (const auto& n : builtin_architectures()) arch_names += (arch_names.empty() ? "" : "|") + n;

  auto* analyze = app.add_subcommand("analyze", "Per-layer parameters, MACs and receptive field");
  analyze->add_option("arch", o.arch, arch_names + "|file")->required();
  analyze->add_option("path", o.path, "Architecture description (with 'file')");
  analyze->add_option("--input-size", o.input_size, "Override input shape, HxWxC");
  analyze->add_option("--rf-mode", o.rf_mode, "conv-only|with-pool")
      ->check(CLI::IsMember({"conv-only", "with-pool"}));
  analyze->add_option("--format", o.format, "table|csv")->check(CLI::IsMember({"table", "csv"}));

  auto* demo = app.add_subcommand("demo", "Write a model with seeded stand-in weights");
  demo->add_option("arch", o.arch, arch_names + "|file")->required();
  demo->add_option("path", o.path, "Architecture description (with 'file')");
  demo->add_option("--seed", o.seed, "Weight seed");
  demo->add_option("--out", o.out, "Output .lwcm path")->required();
  demo->add_option("--input-size", o.input_size, "Override input shape, HxWxC");
  demo->add_flag("--zero", o.zero, "All weights zero");

  auto* infer = app.add_subcommand(
      "infer",
      "Classify one image. Pipeline: read PNM, contrast-stretch each channel to 0..255 "
      "(unless --no-stretch), bilinear-resize to the model input, scale pixels to [0,1], "
      "run the model, print human_prob=<p>");
  infer->add_option("--model", o.model, ".lwcm model")->required();
  infer->add_option("--image", o.image, "P5/P6 image")->required();
  infer->add_flag("--no-stretch", o.no_stretch, "Skip contrast stretching");
  infer->add_flag("--direct", o.direct, "Use the reference convolution kernels");

  auto* bench = app.add_subcommand("bench", "Time a model or a single layer kernel");
  bench->add_option("--model", o.model, ".lwcm model");
  bench->add_option("--kernel", o.kernel, "conv|dsc")->check(CLI::IsMember({"conv", "dsc"}));
  bench->add_option("--dk", o.dk, "Kernel size")->check(CLI::PositiveNumber);
  bench->add_option("--m", o.m, "Input channels")->check(CLI::PositiveNumber);
  bench->add_option("--n", o.n, "Output channels")->check(CLI::PositiveNumber);
  bench->add_option("--df", o.df, "Input extent")->check(CLI::PositiveNumber);
  bench->add_option("--iters", o.iters, "Timed iterations")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", o.warmup, "Untimed warm-up runs");
  bench->add_option("--seed", o.seed, "Input and weight seed");

  auto* compare = app.add_subcommand("compare", "Side-by-side cost totals");
  compare->add_option("archs", o.archs, arch_names)->required();
  compare->add_option("--rf-mode", o.rf_mode, "conv-only|with-pool")
      ->check(CLI::IsMember({"conv-only", "with-pool"}));

  auto* convert = app.add_subcommand("convert", "Preprocess a PNM image into a raw .lwt tensor");
  convert->add_option("--image", o.image, "P5/P6 image")->required();
  convert->add_option("--out", o.out, "Output .lwt path")->required();
  convert->add_flag("--stretch", o.stretch, "Contrast-stretch each channel");
  convert->add_option("--resize", o.resize, "Bilinear resize to HxW");

  std::vector<const char*> argv{"lwcnn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*analyze) return cmd_analyze(o, out);
    if (*demo) return cmd_demo(o, out);
    if (*infer) return cmd_infer(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*convert) return cmd_convert(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ImageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace lwcnn::cli
