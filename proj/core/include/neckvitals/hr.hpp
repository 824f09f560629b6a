#pragma once

#include <string>
#include <vector>

#include "neckvitals/config.hpp"
#include "neckvitals/frame.hpp"
#include "neckvitals/io.hpp"
#include "neckvitals/roi.hpp"
#include "neckvitals/spectral.hpp"

namespace neckvitals {

/// Channel mean c0 plus per-channel residuals (channel minus mean at each
/// instant); residual columns sum to zero.
struct CarMontage {
  std::vector<double> c0;
  ChannelMatrix residuals;
};

CarMontage car_montage(const ChannelMatrix& channels);

/// Principal component scores #2 and #3 of the channel covariance, sorted by
/// descending variance. Sign convention: each score's largest-magnitude
/// loading is positive.
struct PcaScores {
  std::vector<double> c1;
  std::vector<double> c2;
};

PcaScores pca_components(const ChannelMatrix& residuals);

struct ComponentCandidate {
  std::string label;  // "c0", "c1", "c2"
  std::vector<double> series;
  Spectrum spectrum;
  double ps = 0.0;
  bool usable = false;
};

/// Index of the candidate with the largest pulse significance; ties keep the
/// earliest. Throws NumericError when no candidate is usable.
std::size_t select_component(const std::vector<ComponentCandidate>& candidates);

/// Full heart-rate path: neck detection on the first frame, half-size
/// downsampling, moving-window component analysis, spectral peak smoothing.
VitalTrace estimate_hr(const FrameSequence& seq, const TemplateImage& tmpl,
                       const PipelineConfig& cfg = PipelineConfig{});

}  // namespace neckvitals
