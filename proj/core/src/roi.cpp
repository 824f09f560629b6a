#include "neckvitals/roi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "neckvitals/errors.hpp"
#include "neckvitals/imaging.hpp"

namespace neckvitals {

TemplateImage build_template(const std::vector<Frame>& crops, std::string provenance) {
  if (crops.empty()) throw ValidationError("template needs at least one crop");
  std::vector<double> acc(static_cast<std::size_t>(kTemplateWidth) * kTemplateHeight, 0.0);
  for (const Frame& crop : crops) {
    const Frame resized = (crop.width == kTemplateWidth && crop.height == kTemplateHeight)
                              ? crop
                              : resize_bicubic(crop, kTemplateWidth, kTemplateHeight);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += resized.pixels[i];
  }
  TemplateImage out;
  out.image = make_frame(kTemplateWidth, kTemplateHeight);
  const double n = static_cast<double>(crops.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double v = std::round(acc[i] / n);
    out.image.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  out.provenance = std::move(provenance);
  return out;
}

std::vector<std::vector<double>> mad_map(const Frame& search, const Frame& templ) {
  if (templ.width > search.width || templ.height > search.height)
    throw ValidationError("template larger than search frame");
  const int rows = search.height - templ.height + 1;
  const int cols = search.width - templ.width + 1;
  const double area = static_cast<double>(templ.width) * templ.height;
  std::vector<std::vector<double>> map(rows, std::vector<double>(cols));
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      std::uint64_t sum = 0;
      for (int i = 0; i < templ.height; ++i) {
        const std::uint8_t* srow = search.pixels.data() +
                                   static_cast<std::size_t>(y + i) * search.width + x;
        const std::uint8_t* trow = templ.pixels.data() + static_cast<std::size_t>(i) * templ.width;
        for (int j = 0; j < templ.width; ++j)
          sum += static_cast<std::uint64_t>(std::abs(static_cast<int>(srow[j]) - trow[j]));
      }
      map[y][x] = static_cast<double>(sum) / area;
    }
  }
  return map;
}

std::vector<std::vector<double>> amad_map(const std::vector<std::vector<double>>& mad,
                                          double factor) {
  if (mad.empty() || mad.front().empty()) throw ValidationError("empty difference map");
  std::vector<std::vector<double>> out(mad.size());
  for (std::size_t y = 0; y < mad.size(); ++y) {
    const auto& row = mad[y];
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    out[y].resize(row.size());
    for (std::size_t x = 0; x < row.size(); ++x) out[y][x] = row[x] - factor * mean;
  }
  return out;
}

MatchResult detect_neck(const Frame& frame, const TemplateImage& templ,
                        const std::vector<double>& scales, double factor) {
  if (scales.empty()) throw ValidationError("no template scales given");
  bool found = false;
  MatchResult best{};
  double best_score = 0.0;
  for (double scale : scales) {
    if (!(scale > 0.0)) throw ValidationError("template scale must be positive");
    const int tw = static_cast<int>(std::ceil(scale * templ.image.width));
    const int th = static_cast<int>(std::ceil(scale * templ.image.height));
    if (tw > frame.width || th > frame.height) continue;
    const Frame scaled = (tw == templ.image.width && th == templ.image.height)
                             ? templ.image
                             : resize_bicubic(templ.image, tw, th);
    const auto adjusted = amad_map(mad_map(frame, scaled), factor);
    for (std::size_t y = 0; y < adjusted.size(); ++y) {
      for (std::size_t x = 0; x < adjusted[y].size(); ++x) {
        if (!found || adjusted[y][x] < best_score) {
          found = true;
          best_score = adjusted[y][x];
          best.rect = Rect{static_cast<int>(y), static_cast<int>(x), th, tw};
          best.scale = scale;
          best.score = adjusted[y][x];
        }
      }
    }
  }
  if (!found) throw ValidationError("frame smaller than every scaled template");
  return best;
}

Rect expand_breathing_roi(const Rect& neck, int frame_width, int frame_height) {
  if (!rect_within(neck, frame_width, frame_height))
    throw ValidationError("neck rect out of frame bounds");
  const int top = neck.top - 2 * neck.height;
  const int bottom = neck.top + 3 * neck.height;  // exclusive
  Rect out;
  out.top = std::max(0, top);
  out.left = neck.left;
  out.width = neck.width;
  out.height = std::min(frame_height, bottom) - out.top;
  return out;
}

}  // namespace neckvitals
