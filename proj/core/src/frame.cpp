#include "neckvitals/frame.hpp"

#include <cmath>
#include <string>

#include "neckvitals/errors.hpp"

namespace neckvitals {

Frame make_frame(int width, int height, std::uint8_t fill) {
  if (width <= 0 || height <= 0) throw ValidationError("frame dimensions must be positive");
  Frame f;
  f.width = width;
  f.height = height;
  f.pixels.assign(static_cast<std::size_t>(width) * height, fill);
  return f;
}

void validate_sequence(const FrameSequence& seq) {
  if (seq.frames.empty()) throw ValidationError("sequence has no frames");
  if (seq.timestamps.size() != seq.frames.size())
    throw ValidationError("timestamp count does not match frame count");
  const int w = seq.frames.front().width;
  const int h = seq.frames.front().height;
  if (w <= 0 || h <= 0) throw ValidationError("frame dimensions must be positive");
  for (const Frame& f : seq.frames) {
    if (f.width != w || f.height != h) throw ValidationError("frames differ in dimensions");
    if (f.pixels.size() != static_cast<std::size_t>(w) * h)
      throw ValidationError("pixel buffer size does not match dimensions");
  }
  for (std::size_t i = 0; i < seq.timestamps.size(); ++i) {
    if (!std::isfinite(seq.timestamps[i])) throw ValidationError("non-finite timestamp");
    if (i > 0 && !(seq.timestamps[i] > seq.timestamps[i - 1]))
      throw ValidationError("timestamps not strictly increasing");
  }
}

bool rect_within(const Rect& r, int frame_width, int frame_height) {
  return r.top >= 0 && r.left >= 0 && r.height > 0 && r.width > 0 &&
         r.top + r.height <= frame_height && r.left + r.width <= frame_width;
}

std::vector<TimeWindow> windows(double span, const TimeWindow& cfg) {
  if (cfg.duration <= 0.0) throw ValidationError("window duration must be positive");
  if (cfg.increment <= 0.0) throw ValidationError("window increment must be positive");
  if (span < cfg.duration) throw ValidationError("recording span shorter than window duration");
  const auto count = static_cast<std::size_t>(std::floor((span - cfg.duration) / cfg.increment)) + 1;
  std::vector<TimeWindow> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    TimeWindow w = cfg;
    w.start = cfg.start + static_cast<double>(k) * cfg.increment;
    out.push_back(w);
  }
  return out;
}

ChannelMatrix extract_channels(const FrameSequence& seq, const Rect& roi) {
  validate_sequence(seq);
  const int fw = seq.frames.front().width;
  const int fh = seq.frames.front().height;
  if (!rect_within(roi, fw, fh)) throw ValidationError("roi out of frame bounds");
  ChannelMatrix m;
  m.np = roi.height * roi.width;
  m.nt = static_cast<int>(seq.size());
  m.data.resize(static_cast<std::size_t>(m.np) * m.nt);
  m.timestamps = seq.timestamps;
  for (int t = 0; t < m.nt; ++t) {
    const Frame& f = seq.frames[t];
    double* col = m.data.data() + static_cast<std::size_t>(t) * m.np;
    int p = 0;
    for (int r = 0; r < roi.height; ++r)
      for (int c = 0; c < roi.width; ++c, ++p)
        col[p] = static_cast<double>(f.at(roi.top + r, roi.left + c));
  }
  return m;
}

}  // namespace neckvitals
