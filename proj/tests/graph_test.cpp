#include <gtest/gtest.h>

#include "lwcnn/graph.hpp"
#include "lwcnn/graph_text.hpp"

using namespace lwcnn;

namespace {

std::vector<const LayerSpec*> weighted(const ModelGraph& g) {
  std::vector<const LayerSpec*> out;
  for (const auto& l : g.layers)
    if (is_conv_like(l.kind)) out.push_back(&l);
  return out;
}

ModelGraph tiny() {
  return {"tiny",
          {8, 8, 3},
          {conv_layer("c1", 3, 3, 4), maxpool_layer("p1"), dsc_layer_spec("d1", 3, 4, 6),
           flatten_layer(), classifier_layer("classifier", 4 * 4 * 6, 1, ClassifierKind::Sigmoid)},
          {}};
}

}  // namespace

TEST(Proposed, TenConvLayersWithExpectedShapes) {
  const auto g = build_proposed();
  ASSERT_TRUE(validate(g).ok());
  const auto w = weighted(g);
  ASSERT_EQ(w.size(), 10u);
  EXPECT_EQ(w[8]->kind, LayerKind::Bottleneck);
  EXPECT_EQ(w[8]->kernel, 1u);
  EXPECT_FALSE(w[8]->has_batchnorm);
  EXPECT_EQ(w[9]->kind, LayerKind::DepthwiseSeparable);
  EXPECT_EQ(w[9]->kernel, 7u);
  EXPECT_EQ(w[9]->padding, Padding::Valid);

  const auto shapes = infer_shapes(g);
  auto out_of = [&](std::string_view name) {
    for (std::size_t i = 0; i < g.layers.size(); ++i)
      if (g.layers[i].name == name) return shapes[i];
    return Shape{};
  };
  EXPECT_EQ(out_of("layer3"), (Shape{224, 224, 64}));
  EXPECT_EQ(out_of("pool3"), (Shape{112, 112, 64}));
  EXPECT_EQ(out_of("layer8"), (Shape{14, 14, 512}));
  EXPECT_EQ(out_of("layer9"), (Shape{7, 7, 128}));
  EXPECT_EQ(out_of("layer10"), (Shape{1, 1, 512}));
  EXPECT_EQ(out_of("flatten"), (Shape{512}));
  EXPECT_EQ(shapes.back(), (Shape{1}));
  EXPECT_EQ(g.layers.back().classifier, ClassifierKind::Sigmoid);
}

TEST(Proposed, SoftmaxVariantHasTwoOutputs) {
  EXPECT_EQ(infer_shapes(build_proposed(ClassifierKind::Softmax)).back(), (Shape{2}));
}

TEST(Ablation, SevenConvLayersEndingAt1x1x512) {
  const auto g = build_ablation();
  ASSERT_TRUE(validate(g).ok());
  EXPECT_EQ(weighted(g).size(), 7u);
  EXPECT_EQ(weighted(g)[0]->kernel, 7u);
  EXPECT_EQ(weighted(g)[1]->kernel, 5u);
  const auto shapes = infer_shapes(g);
  EXPECT_EQ(shapes[shapes.size() - 3], (Shape{1, 1, 512}));
}

TEST(MobileNetFamily, ShapesEndAtClassifier) {
  const auto m = build_mobilenet();
  ASSERT_TRUE(validate(m).ok()) << validate(m).violations.front();
  EXPECT_EQ(infer_shapes(m).back(), (Shape{1000}));
  EXPECT_EQ(m.conv_layer_count(), 14u);
  const auto l = build_lcnn();
  ASSERT_TRUE(validate(l).ok());
  EXPECT_EQ(infer_shapes(l).back(), (Shape{2}));
  EXPECT_FALSE(m.note.empty());
}

TEST(Architectures, LookupByName) {
  for (const auto& name : builtin_architectures()) EXPECT_EQ(build_architecture(name).name, name);
  EXPECT_THROW(build_architecture("resnet"), GraphError);
}

TEST(InferShapes, ChannelMismatchNamesLayers) {
  auto g = tiny();
  g.layers[2].in_channels = 5;
  try {
    infer_shapes(g);
    FAIL() << "expected GraphError";
  } catch (const GraphError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("d1"), std::string::npos) << msg;
  }
}

TEST(InferShapes, ValidKernelLargerThanInput) {
  auto g = tiny();
  g.layers[2].kernel = 7;
  g.layers[2].padding = Padding::Valid;
  EXPECT_THROW(infer_shapes(g), GraphError);
}

TEST(Validate, CatchesStructuralErrors) {
  EXPECT_TRUE(validate(tiny()).ok());

  auto dup = tiny();
  dup.layers[2].name = "c1";
  EXPECT_FALSE(validate(dup).ok());

  auto bn_bottleneck = tiny();
  bn_bottleneck.layers.insert(bn_bottleneck.layers.begin() + 2, bottleneck_layer("b", 4, 4));
  EXPECT_TRUE(validate(bn_bottleneck).ok());
  bn_bottleneck.layers[2].has_batchnorm = true;
  EXPECT_FALSE(validate(bn_bottleneck).ok());

  auto bottleneck_then_pool = tiny();
  bottleneck_then_pool.layers.insert(bottleneck_then_pool.layers.begin() + 1,
                                     bottleneck_layer("b", 4, 4));
  // Now followed directly by maxpool p1.
  EXPECT_FALSE(validate(bottleneck_then_pool).ok());

  auto no_classifier = tiny();
  no_classifier.layers.pop_back();
  EXPECT_FALSE(validate(no_classifier).ok());

  auto zero_kernel = tiny();
  zero_kernel.layers[0].kernel = 0;
  EXPECT_FALSE(validate(zero_kernel).ok());

  auto dotted = tiny();
  dotted.layers[0].name = "c.1";
  EXPECT_FALSE(validate(dotted).ok());

  EXPECT_THROW(require_valid(no_classifier), GraphError);
}

TEST(ExpectedTensors, RolesAndShapes) {
  const auto specs = expected_tensors(tiny());
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{
                       "c1.w", "c1.b", "c1.bn_gamma", "c1.bn_beta", "c1.bn_mean", "c1.bn_var",
                       "d1.dw_w", "d1.dw_b", "d1.pw_w", "d1.pw_b", "d1.bn_gamma", "d1.bn_beta",
                       "d1.bn_mean", "d1.bn_var", "classifier.w", "classifier.b"}));
  EXPECT_EQ(specs[0].shape, (Shape{3, 3, 3, 4}));
  EXPECT_EQ(specs[6].shape, (Shape{3, 3, 4}));
  EXPECT_EQ(specs[8].shape, (Shape{1, 1, 4, 6}));
  EXPECT_EQ(specs[14].shape, (Shape{96, 1}));
}

TEST(GraphText, ParsesGrammar) {
  const auto g = parse_graph_text(
      "# demo\n"
      "name small\n"
      "input 8 8 3\n"
      "conv 3 1 4 same bn relu name=c1\n"
      "maxpool   # halve\n"
      "dsc 3 1 6 same bn relu eps=0.001\n"
      "flatten\n"
      "classifier 1 sigmoid\n");
  EXPECT_EQ(g.name, "small");
  ASSERT_EQ(g.layers.size(), 5u);
  EXPECT_EQ(g.layers[0].name, "c1");
  EXPECT_EQ(g.layers[2].name, "dsc6");
  EXPECT_EQ(g.layers[2].in_channels, 4u);
  EXPECT_EQ(g.layers[4].in_channels, 96u);
  EXPECT_TRUE(validate(g).ok());
}

TEST(GraphText, ReportsLineNumbers) {
  try {
    parse_graph_text("input 8 8 3\nconv 3 1 4\nconv x 1 4\n");
    FAIL();
  } catch (const GraphParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_graph_text("conv 3 1 4\n"), GraphParseError);
  EXPECT_THROW(parse_graph_text("input 8 8 3\nwarp 3\n"), GraphParseError);
  EXPECT_THROW(parse_graph_text("input 8 8 3\nconv 3 1 4 shiny\n"), GraphParseError);
}

TEST(GraphText, BuiltinsRoundTrip) {
  for (const auto& name : builtin_architectures()) {
    auto g = build_architecture(name);
    g.note.clear();
    EXPECT_EQ(parse_graph_text(write_graph_text(g)), g) << name;
  }
}

TEST(WithInputShape, RewiresChannelsAndFeatures) {
  const auto g = with_input_shape(tiny(), {16, 12, 1});
  EXPECT_EQ(g.layers[0].in_channels, 1u);
  EXPECT_EQ(g.layers.back().in_channels, 8u * 6 * 6);
  EXPECT_TRUE(validate(g).ok());
  EXPECT_EQ(infer_shapes(with_input_shape(build_mobilenet(), {448, 448, 3})).back(), (Shape{1000}));
  EXPECT_THROW(with_input_shape(tiny(), {8, 8}), GraphError);
}
