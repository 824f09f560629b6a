#include "neckvitals/br.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

#include "neckvitals/errors.hpp"
#include "neckvitals/imaging.hpp"
#include "neckvitals/smoothing.hpp"
#include "neckvitals/spectral.hpp"

namespace neckvitals {

namespace {

std::vector<double> uniform_times(double t0, double rate, std::size_t n) {
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = t0 + static_cast<double>(i) / rate;
  }
  return times;
}

}  // namespace

VitalTrace estimate_br(const FrameSequence& seq, const TemplateImage& tmpl,
                       const PipelineConfig& cfg) {
  validate_config(cfg);
  validate_sequence(seq);
  if (seq.span() < cfg.window.duration) {
    throw ValidationError("sequence is shorter than one analysis window");
  }

  const MatchResult match =
      detect_neck(seq.frames.front(), tmpl, cfg.template_scales, cfg.amad_factor);
  const Rect roi = expand_breathing_roi(match.rect, seq.frames.front().width,
                                        seq.frames.front().height);
  auto [values, times] = spatial_average(seq, roi);

  const std::vector<double> grid = freq_grid(nyquist_from_times(times), cfg.grid_step);
  TimeWindow wcfg = cfg.window;
  wcfg.start = times.front();
  const std::vector<TimeWindow> wins = windows(seq.span(), wcfg);

  const HmmConfig hmm{cfg.br_band, cfg.grid_step, cfg.smoothing_lambda, cfg.hmm_bidirectional};
  ChainPotentials chain;
  VitalTrace trace;

  // Optional whole-span variant: one resample + filter pass, windows sliced
  // from the already-filtered uniform series.
  std::vector<double> span_filtered;
  std::vector<double> span_times;
  if (cfg.filter_before_windowing) {
    auto [uniform, rate] = resample_uniform(values, times);
    span_filtered = butter_bandpass_zero_phase(uniform, rate, cfg.br_band, cfg.butter_order);
    span_times = uniform_times(times.front(), rate, uniform.size());
  }
  const std::vector<double>& slice_values = cfg.filter_before_windowing ? span_filtered : values;
  const std::vector<double>& slice_times = cfg.filter_before_windowing ? span_times : times;

  for (const TimeWindow& win : wins) {
    const auto first = std::lower_bound(slice_times.begin(), slice_times.end(), win.start);
    const auto last = std::lower_bound(first, slice_times.end(), win.start + win.duration);
    std::vector<double> wv(slice_values.begin() + (first - slice_times.begin()),
                           slice_values.begin() + (last - slice_times.begin()));
    std::vector<double> wt(first, last);

    Spectrum spec;
    if (cfg.filter_before_windowing) {
      spec = lomb_scargle(wv, wt, grid);
    } else {
      auto [uniform, rate] = resample_uniform(wv, wt);
      const std::vector<double> filtered =
          butter_bandpass_zero_phase(uniform, rate, cfg.br_band, cfg.butter_order);
      spec = lomb_scargle(filtered, uniform_times(wt.front(), rate, filtered.size()), grid);
    }
    append_window(chain, spec, hmm);
    trace.window_starts.push_back(win.start);
  }

  const std::vector<double> path = map_chain(chain, hmm);
  trace.rate_bpm.resize(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    trace.rate_bpm[i] = 60.0 * path[i];
  }
  return trace;
}

}  // namespace neckvitals
