#include "neckvitals/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "neckvitals/errors.hpp"

namespace neckvitals {

namespace {

std::string trim_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void validate_config(const PipelineConfig& cfg) {
  if (!(cfg.window.duration > 0.0) || !(cfg.window.increment > 0.0)) {
    throw ValidationError("window duration and increment must be positive");
  }
  validate_band(cfg.hr_band);
  validate_band(cfg.br_band);
  if (!(cfg.smoothing_lambda >= 0.0) || !std::isfinite(cfg.smoothing_lambda)) {
    throw ValidationError("smoothing lambda must be finite and nonnegative");
  }
  if (!(cfg.grid_step > 0.0)) {
    throw ValidationError("grid step must be positive");
  }
  if (!std::isfinite(cfg.amad_factor)) {
    throw ValidationError("AMAD factor must be finite");
  }
  if (cfg.template_scales.empty()) {
    throw ValidationError("at least one template scale is required");
  }
  for (double s : cfg.template_scales) {
    if (!(s > 0.0) || !(s <= 1.0)) {
      throw ValidationError("template scales must lie in (0, 1]");
    }
  }
  if (cfg.butter_order < 1) {
    throw ValidationError("filter order must be at least 1");
  }
}

std::string config_dump(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "window_duration_s=" << trim_number(cfg.window.duration) << '\n';
  out << "window_increment_s=" << trim_number(cfg.window.increment) << '\n';
  out << "hr_band_lo_hz=" << trim_number(cfg.hr_band.lo) << '\n';
  out << "hr_band_hi_hz=" << trim_number(cfg.hr_band.hi) << '\n';
  out << "br_band_lo_hz=" << trim_number(cfg.br_band.lo) << '\n';
  out << "br_band_hi_hz=" << trim_number(cfg.br_band.hi) << '\n';
  out << "smoothing_lambda=" << trim_number(cfg.smoothing_lambda) << '\n';
  out << "grid_step_hz=" << trim_number(cfg.grid_step) << '\n';
  out << "amad_factor=" << trim_number(cfg.amad_factor) << '\n';
  out << "template_scales=";
  for (std::size_t i = 0; i < cfg.template_scales.size(); ++i) {
    if (i) out << ',';
    out << trim_number(cfg.template_scales[i]);
  }
  out << '\n';
  out << "butter_order=" << cfg.butter_order << '\n';
  out << "kurtosis_weighting="
      << (cfg.kurtosis_weighting == KurtosisWeighting::kFrequency ? "frequency" : "power")
      << '\n';
  out << "hmm_bidirectional=" << (cfg.hmm_bidirectional ? "true" : "false") << '\n';
  out << "filter_before_windowing=" << (cfg.filter_before_windowing ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace neckvitals
