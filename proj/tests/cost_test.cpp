#include <gtest/gtest.h>

#include "lwcnn/cost.hpp"

using namespace lwcnn;

TEST(ConvCost, SpotValues) {
  EXPECT_EQ(conv_macs({3, 3, 32, 224}), 43352064u);
  EXPECT_EQ(dsc_macs({3, 3, 32, 224}), 6171648u);
  EXPECT_EQ(conv_macs({1, 1, 1, 1}), 1u);
  EXPECT_EQ(dsc_macs({1, 1, 1, 1}), 2u);
  EXPECT_THROW(conv_macs({0, 1, 1, 1}), RangeError);
}

TEST(ConvCost, StridedUsesOutputExtent) {
  EXPECT_EQ(conv_macs({3, 3, 32, 224, 2}), 9ull * 3 * 32 * 112 * 112);
}

TEST(DscRatio, LowestTerms) {
  EXPECT_EQ(dsc_ratio(3, 32), (Rational{41, 288}));
  EXPECT_EQ(dsc_ratio(1, 1), (Rational{2, 1}));
  EXPECT_NEAR(dsc_ratio(3, 512).to_double(), 1.0 / 512 + 1.0 / 9, 1e-15);
  EXPECT_THROW(dsc_ratio(0, 3), RangeError);
}

TEST(ReceptiveField, Chains) {
  EXPECT_EQ(receptive_field({}), 1u);
  EXPECT_EQ(receptive_field({{3, 1}}), 3u);
  EXPECT_EQ(receptive_field({{3, 1}, {3, 1}}), 5u);
  EXPECT_EQ(receptive_field({{3, 1}, {3, 1}, {3, 1}}), 7u);
  EXPECT_EQ(receptive_field({{7, 1}}), 7u);
  EXPECT_EQ(receptive_field({{3, 1}, {2, 2}, {3, 1}}), 8u);
  EXPECT_EQ(receptive_field({{3, 2}, {3, 1}}), 7u);
  EXPECT_THROW(receptive_field({{3, 0}}), RangeError);
}

TEST(ReceptiveField, ProposedAndAblationAgree) {
  const auto p = build_proposed();
  const auto a = build_ablation();
  EXPECT_EQ(receptive_field(rf_chain(p, RFMode::ConvOnly)),
            receptive_field(rf_chain(a, RFMode::ConvOnly)));
  EXPECT_EQ(receptive_field(rf_chain(p, RFMode::ConvOnly)), 23u);
}

TEST(LayerParams, KindsSplitIntoParts) {
  EXPECT_EQ(layer_params(conv_layer("c", 3, 3, 64)), (ParamCount{1728, 64, 256}));
  EXPECT_EQ(layer_params(dsc_layer_spec("d", 3, 64, 128)), (ParamCount{8768, 192, 512}));
  EXPECT_EQ(layer_params(bottleneck_layer("b", 512, 128)), (ParamCount{65536, 128, 0}));
  EXPECT_EQ(layer_params(classifier_layer("f", 512, 1, ClassifierKind::Sigmoid)),
            (ParamCount{512, 1, 0}));
  EXPECT_EQ(layer_params(maxpool_layer("p")).total(), 0u);
}

TEST(AnalyzeModel, ProposedTotals) {
  const auto r = analyze_model(build_proposed());
  EXPECT_EQ(r.params.weights, 315648u);
  EXPECT_EQ(r.weight_bytes(), 4 * r.params.total());
  EXPECT_GT(r.macs, 0u);
  std::uint64_t sum = 0;
  for (const auto& row : r.rows) sum += row.macs;
  EXPECT_EQ(sum, r.macs);
  EXPECT_FALSE(r.notes.empty());
}

TEST(AnalyzeModel, LayerMacsMatchClosedForms) {
  const auto r = analyze_model(build_proposed());
  auto row = [&](std::string_view n) {
    for (const auto& x : r.rows)
      if (x.name == n) return x;
    return CostRow{};
  };
  EXPECT_EQ(row("layer1").macs, conv_macs({3, 3, 64, 224}));
  EXPECT_EQ(row("layer4").macs, dsc_macs({3, 64, 64, 112}));
  EXPECT_EQ(row("layer9").macs, conv_macs({1, 512, 128, 7}));
  EXPECT_EQ(row("layer10").macs, 49ull * 128 + 128ull * 512);
  EXPECT_EQ(row("classifier").macs, 512u);
}

TEST(AnalyzeModel, StridedModelsCarryNote) {
  const auto r = analyze_model(build_mobilenet());
  bool found = false;
  for (const auto& n : r.notes) found |= n.find("strided") != std::string::npos;
  EXPECT_TRUE(found);
  EXPECT_EQ(r.rows.front().macs, conv_macs({3, 3, 32, 224, 2}));
}

TEST(Render, CsvHeaderAndRows) {
  const auto r = analyze_model(build_ablation());
  const auto csv = render_report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layer,kind,out_shape,params,macs,rf");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.rows.size() + 1);
  EXPECT_NE(render_report_table(r).find("total"), std::string::npos);
}

TEST(Compare, ProposedSmallerThanMobileNet) {
  const auto c = compare_models({analyze_model(build_proposed()), analyze_model(build_mobilenet())});
  EXPECT_LT(c.weight_bytes[0], c.weight_bytes[1]);
  EXPECT_NE(render_comparison(c).find("proposed"), std::string::npos);
}
