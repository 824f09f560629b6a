#include <cstdint>
#include <random>

#include <benchmark/benchmark.h>

#include "neckvitals/imaging.hpp"
#include "neckvitals/roi.hpp"

namespace {

neckvitals::Frame make_noise_frame(int width, int height, std::uint64_t seed) {
  neckvitals::Frame f = neckvitals::make_frame(width, height);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(px(rng));
  return f;
}

neckvitals::TemplateImage make_template() {
  neckvitals::TemplateImage t;
  t.image = make_noise_frame(neckvitals::kTemplateWidth, neckvitals::kTemplateHeight, 5);
  return t;
}

void bench_detect_neck(benchmark::State& state) {
  const neckvitals::Frame frame = make_noise_frame(640, 120, 17);
  const neckvitals::TemplateImage templ = make_template();
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::detect_neck(frame, templ));
  }
}

void bench_mad_map(benchmark::State& state) {
  const neckvitals::Frame frame = make_noise_frame(640, 120, 23);
  const neckvitals::Frame templ = make_noise_frame(neckvitals::kTemplateWidth,
                                                   neckvitals::kTemplateHeight, 29);
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::mad_map(frame, templ));
  }
}

void bench_downsample_half(benchmark::State& state) {
  neckvitals::FrameSequence seq;
  seq.nominal_rate = 62.0;
  for (int i = 0; i < 64; ++i) {
    seq.frames.push_back(make_noise_frame(640, 120, 31 + i));
    seq.timestamps.push_back(i / seq.nominal_rate);
  }
  const neckvitals::Rect roi{30, 260, 40, 120};
  for (auto _ : state) {
    benchmark::DoNotOptimize(neckvitals::downsample_half(seq, roi));
  }
}

}  // namespace

BENCHMARK(bench_detect_neck)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_mad_map)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_downsample_half)->Unit(benchmark::kMillisecond);
