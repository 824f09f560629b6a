#pragma once

#include "neckvitals/config.hpp"
#include "neckvitals/frame.hpp"
#include "neckvitals/io.hpp"
#include "neckvitals/roi.hpp"

namespace neckvitals {

/// Breathing-rate path: neck detection, expanded ROI spatial mean, per-window
/// uniform resampling and zero-phase band-pass, spectral peak smoothing.
VitalTrace estimate_br(const FrameSequence& seq, const TemplateImage& tmpl,
                       const PipelineConfig& cfg = PipelineConfig{});

}  // namespace neckvitals
