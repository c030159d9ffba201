// Compares a conventional 3x3 convolution with its depthwise-separable counterpart:
// predicted MAC ratio versus measured time ratio.

#include <cstdio>

#include "lwcnn/lwcnn.hpp"

int main() {
  using namespace lwcnn;
  constexpr std::size_t k = 3, m = 32, n = 64, df = 56;

  const auto input = seeded_uniform({df, df, m}, 1, -1.0f, 1.0f);
  const ConvWeights conv{seeded_uniform({k, k, m, n}, 2, -0.1f, 0.1f), Tensor::zeros({n})};
  const DepthwiseWeights dw{seeded_uniform({k, k, m}, 3, -0.1f, 0.1f), Tensor::zeros({m})};
  const ConvWeights pw{seeded_uniform({1, 1, m, n}, 4, -0.1f, 0.1f), Tensor::zeros({n})};

  const auto conv_time = run_bench("conv", 3, 30, [&] { conv2d(input, conv, 1, Padding::Same); });
  const auto dsc_time = run_bench("dsc", 3, 30, [&] { dsc_layer(input, dw, pw); });

  const ConvCost cost{k, m, n, df, 1};
  std::printf("%s", render_bench({conv_time, dsc_time}).c_str());
  std::printf("MAC ratio  (1/N + 1/Dk^2): %.4f\n", dsc_ratio(k, n).to_double());
  std::printf("MACs       conv %llu  dsc %llu\n",
              static_cast<unsigned long long>(conv_macs(cost)),
              static_cast<unsigned long long>(dsc_macs(cost)));
  std::printf("time ratio (median):       %.4f\n", dsc_time.median_ms / conv_time.median_ms);
}
