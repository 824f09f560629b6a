#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "neckvitals/spectral.hpp"

namespace {

struct WindowData {
  std::vector<double> values;
  std::vector<double> times;
};

WindowData make_window(std::size_t n) {
  WindowData w;
  std::mt19937_64 rng(4711);
  std::uniform_real_distribution<double> jitter(-0.0008, 0.0008);
  std::normal_distribution<double> noise(0.0, 0.3);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w.times.push_back(t);
    w.values.push_back(std::sin(2.0 * std::numbers::pi * 1.2 * t) + noise(rng));
    t += 1.0 / 62.0 + jitter(rng);
  }
  return w;
}

void bench_lomb_scargle(benchmark::State& state) {
  const WindowData w = make_window(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> grid = neckvitals::freq_grid(31.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::lomb_scargle(w.values, w.times, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(grid.size()));
}

void bench_band_kurtosis(benchmark::State& state) {
  const WindowData w = make_window(1860);
  const std::vector<double> grid = neckvitals::freq_grid(31.0);
  const neckvitals::Spectrum sp = neckvitals::lomb_scargle(w.values, w.times, grid);
  const neckvitals::Band band{0.75, 2.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        neckvitals::band_kurtosis(sp, band, neckvitals::KurtosisWeighting::kPower));
  }
}

void bench_zero_phase_filter(benchmark::State& state) {
  const WindowData w = make_window(static_cast<std::size_t>(state.range(0)));
  const neckvitals::Band band{0.08, 0.5};
  for (auto _ : state) {
    auto [values, rate] = neckvitals::resample_uniform(w.values, w.times);
    benchmark::DoNotOptimize(neckvitals::butter_bandpass_zero_phase(values, rate, band));
  }
}

}  // namespace

BENCHMARK(bench_lomb_scargle)->Arg(1860)->Arg(3720)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_band_kurtosis);
BENCHMARK(bench_zero_phase_filter)->Arg(3720)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
