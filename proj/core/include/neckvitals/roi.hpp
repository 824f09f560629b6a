#pragma once

#include <string>
#include <vector>

#include "neckvitals/frame.hpp"

namespace neckvitals {

inline constexpr int kTemplateWidth = 81;
inline constexpr int kTemplateHeight = 19;

/// Average neck appearance used for matching.
struct TemplateImage {
  Frame image;  // kTemplateWidth x kTemplateHeight
  std::string provenance;
};

/// Resizes every crop to the native template size (bicubic) and takes the
/// rounded pixelwise mean.
TemplateImage build_template(const std::vector<Frame>& crops, std::string provenance = {});

struct MatchResult {
  Rect rect;           // best placement, dimensions of the winning scale
  double scale = 1.0;  // winning template scale
  double score = 0.0;  // adjusted-difference value at the optimum
};

/// Mean absolute difference for every placement; result[row][col], with
/// (search_h - templ_h + 1) rows and (search_w - templ_w + 1) cols.
std::vector<std::vector<double>> mad_map(const Frame& search, const Frame& templ);

/// Subtracts factor times each row's mean from that row's entries.
std::vector<std::vector<double>> amad_map(const std::vector<std::vector<double>>& mad,
                                          double factor = 4.0);

/// Global adjusted-difference minimum over the given template scales
/// (scaled dims round up). Ties prefer earlier scale, then top, then left.
MatchResult detect_neck(const Frame& frame, const TemplateImage& templ,
                        const std::vector<double>& scales = {1.0, 0.8}, double factor = 4.0);

/// Same width, five times the height (two above, two below), clamped.
Rect expand_breathing_roi(const Rect& neck, int frame_width, int frame_height);

}  // namespace neckvitals
