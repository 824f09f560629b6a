#pragma once

#include <string>
#include <vector>

#include "neckvitals/frame.hpp"
#include "neckvitals/spectral.hpp"

namespace neckvitals {

/// Tunable constants shared by both estimation pipelines, with the
/// published defaults.
struct PipelineConfig {
  TimeWindow window;                       // 30 s window, 1 s increment
  Band hr_band{0.75, 2.5};                 // Hz
  Band br_band{0.08, 0.5};                 // Hz
  double smoothing_lambda = 16.0;          // data-term sharpness
  double grid_step = 0.005;                // Hz
  double amad_factor = 4.0;                // row-mean adjustment weight
  std::vector<double> template_scales{1.0, 0.8};
  int butter_order = 3;
  KurtosisWeighting kurtosis_weighting = KurtosisWeighting::kFrequency;
  bool hmm_bidirectional = true;
  bool filter_before_windowing = false;    // breathing path: filter whole span once
};

void validate_config(const PipelineConfig& cfg);

/// key=value defaults table, one entry per line, fixed order.
std::string config_dump(const PipelineConfig& cfg);

}  // namespace neckvitals
