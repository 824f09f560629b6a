#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "neckvitals/hr.hpp"

namespace {

// Residual block shaped like one 30 s analysis window of a half-resolution patch.
neckvitals::ChannelMatrix make_residuals(int channels, int samples) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 1.0);
  neckvitals::ChannelMatrix out;
  out.np = channels;
  out.nt = samples;
  out.data.resize(static_cast<std::size_t>(channels) * samples);
  out.timestamps.resize(samples);
  for (int i = 0; i < samples; ++i) out.timestamps[i] = i / 62.0;
  for (int c = 0; c < channels; ++c) {
    const double phase = 2.0 * std::numbers::pi * c / channels;
    for (int i = 0; i < samples; ++i) {
      out.at(c, i) = std::sin(2.0 * std::numbers::pi * 1.15 * out.timestamps[i] + phase) +
                     0.5 * noise(rng);
    }
  }
  return out;
}

void bench_pca_components(benchmark::State& state) {
  const auto residuals = make_residuals(static_cast<int>(state.range(0)), 1860);
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::pca_components(residuals));
  }
}

void bench_car_montage(benchmark::State& state) {
  const auto channels = make_residuals(static_cast<int>(state.range(0)), 3720);
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::car_montage(channels));
  }
}

}  // namespace

BENCHMARK(bench_pca_components)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_car_montage)->Arg(256)->Unit(benchmark::kMillisecond);
