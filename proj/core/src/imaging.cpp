#include "neckvitals/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "neckvitals/errors.hpp"

namespace neckvitals {
namespace {

// Catmull-Rom weights (bicubic a = -0.5).
double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  return 0.0;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// One separable pass along x: samples 4 taps around the center-aligned
// source coordinate for every output column.
std::vector<double> resample_rows(const std::vector<double>& src, int src_w, int src_h, int out_w) {
  std::vector<double> dst(static_cast<std::size_t>(out_w) * src_h);
  const double sx = static_cast<double>(src_w) / out_w;
  std::vector<int> idx(static_cast<std::size_t>(out_w) * 4);
  std::vector<double> wgt(static_cast<std::size_t>(out_w) * 4);
  for (int x = 0; x < out_w; ++x) {
    const double cx = (x + 0.5) * sx - 0.5;
    const int base = static_cast<int>(std::floor(cx)) - 1;
    for (int k = 0; k < 4; ++k) {
      idx[4 * x + k] = clamp_index(base + k, src_w);
      wgt[4 * x + k] = cubic_weight(cx - (base + k));
    }
  }
  for (int y = 0; y < src_h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * src_w;
    double* out = dst.data() + static_cast<std::size_t>(y) * out_w;
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += wgt[4 * x + k] * row[idx[4 * x + k]];
      out[x] = acc;
    }
  }
  return dst;
}

std::vector<double> transpose(const std::vector<double>& src, int w, int h) {
  std::vector<double> dst(src.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      dst[static_cast<std::size_t>(x) * h + y] = src[static_cast<std::size_t>(y) * w + x];
  return dst;
}

}  // namespace

Frame resize_bicubic(const Frame& src, int out_width, int out_height) {
  if (src.width <= 0 || src.height <= 0 || src.pixels.empty())
    throw ValidationError("resize of empty frame");
  if (out_width <= 0 || out_height <= 0) throw ValidationError("resize target must be positive");

  std::vector<double> work(src.pixels.begin(), src.pixels.end());
  work = resample_rows(work, src.width, src.height, out_width);      // horizontal
  work = transpose(work, out_width, src.height);
  work = resample_rows(work, src.height, out_width, out_height);     // vertical
  work = transpose(work, out_height, out_width);

  Frame out = make_frame(out_width, out_height);
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double v = std::round(work[i]);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

Frame crop(const Frame& src, const Rect& r) {
  if (!rect_within(r, src.width, src.height)) throw ValidationError("crop rect out of bounds");
  Frame out = make_frame(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) out.at(y, x) = src.at(r.top + y, r.left + x);
  return out;
}

void paste(Frame& dst, const Frame& src, int top, int left) {
  Rect r{top, left, src.height, src.width};
  if (!rect_within(r, dst.width, dst.height)) throw ValidationError("paste rect out of bounds");
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) dst.at(top + y, left + x) = src.at(y, x);
}

FrameSequence downsample_half(const FrameSequence& seq, const Rect& roi) {
  validate_sequence(seq);
  if (roi.width < 2 || roi.height < 2) throw ValidationError("roi too small to downsample");
  if (!rect_within(roi, seq.frames.front().width, seq.frames.front().height))
    throw ValidationError("roi out of frame bounds");
  const int out_w = (roi.width + 1) / 2;
  const int out_h = (roi.height + 1) / 2;
  FrameSequence out;
  out.timestamps = seq.timestamps;
  out.nominal_rate = seq.nominal_rate;
  out.frames.reserve(seq.size());
  for (const Frame& f : seq.frames) out.frames.push_back(resize_bicubic(crop(f, roi), out_w, out_h));
  return out;
}

std::pair<std::vector<double>, std::vector<double>> spatial_average(const FrameSequence& seq,
                                                                    const Rect& roi) {
  validate_sequence(seq);
  if (!rect_within(roi, seq.frames.front().width, seq.frames.front().height))
    throw ValidationError("roi out of frame bounds");
  const double count = static_cast<double>(roi.width) * roi.height;
  std::vector<double> values;
  values.reserve(seq.size());
  for (const Frame& f : seq.frames) {
    std::uint64_t sum = 0;
    for (int y = 0; y < roi.height; ++y) {
      const std::uint8_t* row = f.pixels.data() + static_cast<std::size_t>(roi.top + y) * f.width + roi.left;
      for (int x = 0; x < roi.width; ++x) sum += row[x];
    }
    values.push_back(static_cast<double>(sum) / count);
  }
  return {std::move(values), seq.timestamps};
}

}  // namespace neckvitals
