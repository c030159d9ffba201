#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "lwcnn/lwcnn.hpp"

using namespace lwcnn;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lwcnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kImage = std::string(LWCNN_TEST_DATA) + "/person.ppm";

}  // namespace

TEST_F(Cli, AnalyzeTableAndCsv) {
  auto r = run({"analyze", "proposed"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("layer10"), std::string::npos);
  r = run({"analyze", "ablation", "--format", "csv", "--rf-mode", "conv-only"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("layer,kind,out_shape,params,macs,rf\n", 0), 0u);
}

TEST_F(Cli, AnalyzeFileAndInputSize) {
  std::ofstream(path("g.txt")) << "input 8 8 3\nconv 3 1 4 same bn relu\nflatten\nclassifier 1 sigmoid\n";
  auto r = run({"analyze", "file", path("g.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"analyze", "file", path("g.txt"), "--input-size", "16x16x3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("16x16x4"), std::string::npos) << r.out;
  EXPECT_EQ(run({"analyze", "file", path("missing.txt")}).code, cli::kExitIo);
  EXPECT_EQ(run({"analyze", "file", path("g.txt"), "--input-size", "16x16"}).code,
            cli::kExitInvalid);
}

TEST_F(Cli, UnknownArchitectureAndBadFlags) {
  auto r = run({"analyze", "resnet"});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("proposed"), std::string::npos);
  EXPECT_EQ(run({"analyze", "proposed", "--format", "xml"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"bench", "--kernel", "conv", "--iters", "0"}).code, cli::kExitInvalid);
}

TEST_F(Cli, DemoThenInfer) {
  auto r = run({"demo", "proposed", "--seed", "7", "--out", path("m.lwcm")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"infer", "--model", path("m.lwcm"), "--image", kImage});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.out.rfind("human_prob=", 0), 0u);
  const double p = std::stod(r.out.substr(11));
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
}

TEST_F(Cli, InferErrors) {
  ASSERT_EQ(run({"demo", "proposed", "--out", path("m.lwcm")}).code, 0);
  EXPECT_EQ(run({"infer", "--model", path("nope.lwcm"), "--image", kImage}).code, cli::kExitIo);
  std::ofstream(path("junk.lwcm")) << "not a model";
  EXPECT_EQ(run({"infer", "--model", path("junk.lwcm"), "--image", kImage}).code, cli::kExitIo);
  std::ofstream(path("gray.pgm"), std::ios::binary) << "P5 2 2 255\n" << std::string(4, '\x10');
  EXPECT_EQ(run({"infer", "--model", path("m.lwcm"), "--image", path("gray.pgm")}).code,
            cli::kExitInvalid);
}

TEST_F(Cli, BenchKernelAndModel) {
  auto r = run({"bench", "--kernel", "dsc", "--dk", "3", "--m", "4", "--n", "8", "--df", "8",
                "--iters", "3", "--warmup", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("macs " + std::to_string(dsc_macs({3, 4, 8, 8}))), std::string::npos);
  std::ofstream(path("g.txt")) << "input 8 8 3\nconv 3 1 4 name=c\nflatten\nclassifier 1 sigmoid\n";
  ASSERT_EQ(run({"demo", "file", path("g.txt"), "--out", path("s.lwcm")}).code, 0);
  r = run({"bench", "--model", path("s.lwcm"), "--iters", "2", "--warmup", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sum of layer medians"), std::string::npos);
  EXPECT_EQ(run({"bench"}).code, cli::kExitInvalid);
}

TEST_F(Cli, CompareOrdersPayloads) {
  const auto r = run({"compare", "proposed", "mobilenet", "lcnn"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("weight_MiB"), std::string::npos);
}

TEST_F(Cli, ConvertWritesRawTensor) {
  const auto r = run({"convert", "--image", kImage, "--out", path("x.lwt"), "--stretch",
                      "--resize", "224x224"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_raw_file(path("x.lwt"));
  EXPECT_EQ(t.shape(), (Shape{224, 224, 3}));
}

TEST_F(Cli, ZeroModelGivesOneHalf) {
  ASSERT_EQ(run({"demo", "proposed", "--zero", "--out", path("z.lwcm")}).code, 0);
  const auto r = run({"infer", "--model", path("z.lwcm"), "--image", kImage});
  EXPECT_EQ(r.out, "human_prob=0.5\n");
}
