#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lwcnn/error.hpp"

namespace lwcnn {

struct LayerTiming {
  std::string name;
  double median_ms = 0.0;
};

struct BenchResult {
  std::string label;
  std::size_t iterations = 0;
  std::vector<double> times_ms;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
  std::vector<LayerTiming> layers;  // model benches only
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw RangeError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline BenchResult summarize(std::string label, std::vector<double> times_ms) {
  if (times_ms.empty()) throw RangeError("benchmark needs at least one iteration");
  BenchResult r;
  r.label = std::move(label);
  r.iterations = times_ms.size();
  r.median_ms = median_of(times_ms);
  r.min_ms = *std::min_element(times_ms.begin(), times_ms.end());
  r.max_ms = *std::max_element(times_ms.begin(), times_ms.end());
  r.mean_ms = std::accumulate(times_ms.begin(), times_ms.end(), 0.0) /
              static_cast<double>(times_ms.size());
  // A single sample must report identical statistics.
  if (r.iterations == 1) r.mean_ms = r.median_ms = r.min_ms;
  r.times_ms = std::move(times_ms);
  return r;
}

/// Runs fn `warmup` times untimed, then `iterations` times on a monotonic clock.
template <typename Fn>
BenchResult run_bench(std::string label, std::size_t warmup, std::size_t iterations, Fn&& fn) {
  if (iterations == 0) throw RangeError("benchmark needs at least one iteration");
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> times;
  times.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return summarize(std::move(label), std::move(times));
}

inline std::string render_bench(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "label" << std::right << std::setw(7) << "iters"
     << std::setw(13) << "median_ms" << std::setw(13) << "min_ms" << std::setw(13) << "mean_ms"
     << std::setw(13) << "max_ms" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& r : results) {
    os << std::left << std::setw(28) << r.label << std::right << std::setw(7) << r.iterations
       << std::setw(13) << r.median_ms << std::setw(13) << r.min_ms << std::setw(13) << r.mean_ms
       << std::setw(13) << r.max_ms << '\n';
    if (!r.layers.empty()) {
      double sum = 0.0;
      for (const auto& l : r.layers) {
        os << "  " << std::left << std::setw(26) << l.name << std::right << std::setw(20)
           << l.median_ms << '\n';
        sum += l.median_ms;
      }
      os << "  " << std::left << std::setw(26) << "sum of layer medians" << std::right
         << std::setw(20) << sum << '\n';
    }
  }
  return os.str();
}

}  // namespace lwcnn
