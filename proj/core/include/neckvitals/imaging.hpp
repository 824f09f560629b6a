#pragma once

#include <utility>
#include <vector>

#include "neckvitals/frame.hpp"

namespace neckvitals {

/// Catmull-Rom bicubic resample (a = -0.5), edge-clamped, center-aligned
/// sampling, rounded to 8 bits once after both separable passes.
Frame resize_bicubic(const Frame& src, int out_width, int out_height);

Frame crop(const Frame& src, const Rect& r);
void paste(Frame& dst, const Frame& src, int top, int left);

/// Halves each frame of the ROI: output dims ceil(h/2) x ceil(w/2).
FrameSequence downsample_half(const FrameSequence& seq, const Rect& roi);

/// Mean ROI intensity per frame; timestamps passed through.
std::pair<std::vector<double>, std::vector<double>> spatial_average(const FrameSequence& seq,
                                                                    const Rect& roi);

}  // namespace neckvitals
