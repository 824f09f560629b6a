#pragma once

#include <cstdint>
#include <vector>

namespace neckvitals {

/// Single 8-bit grayscale image, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size == width * height

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

Frame make_frame(int width, int height, std::uint8_t fill = 0);

/// Timestamped frames; gaps may be uneven (floating frame rate).
struct FrameSequence {
  std::vector<Frame> frames;        // all identical dimensions
  std::vector<double> timestamps;   // seconds, strictly increasing, one per frame
  double nominal_rate = 0.0;        // Hz, informational only

  std::size_t size() const { return frames.size(); }
  double span() const { return timestamps.empty() ? 0.0 : timestamps.back() - timestamps.front(); }
};

/// Throws ValidationError unless the sequence invariants hold
/// (nonempty, uniform dimensions, strictly increasing finite timestamps).
void validate_sequence(const FrameSequence& seq);

/// Top-left origin, half-open extents.
struct Rect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
};

bool rect_within(const Rect& r, int frame_width, int frame_height);

/// Uniform-rate gold-standard physiological recording.
struct ReferenceRecording {
  enum class Kind { BVP, BW };
  Kind kind = Kind::BVP;
  double sample_rate = 0.0;  // Hz, constant
  double start_time = 0.0;   // seconds
  std::vector<double> samples;
};

/// Moving analysis window parameters.
struct TimeWindow {
  double start = 0.0;      // seconds
  double duration = 30.0;  // seconds
  double increment = 1.0;  // seconds
};

/// All window placements inside a recording of the given span, ordered by start.
/// count == floor((span - duration)/increment) + 1. Throws if span < duration.
std::vector<TimeWindow> windows(double span, const TimeWindow& cfg);

/// Per-pixel intensity time series for an ROI: np channels by nt samples.
/// Storage is sample-major (data[t*np + p]) so a time window is one
/// contiguous block of columns when viewed as an np-by-nt column-major matrix.
struct ChannelMatrix {
  int np = 0;
  int nt = 0;
  std::vector<double> data;        // size np * nt, data[t*np + p]
  std::vector<double> timestamps;  // size nt

  double at(int channel, int sample) const { return data[static_cast<std::size_t>(sample) * np + channel]; }
  double& at(int channel, int sample) { return data[static_cast<std::size_t>(sample) * np + channel]; }
};

/// One channel per ROI pixel (row-major within the ROI), one sample per frame.
ChannelMatrix extract_channels(const FrameSequence& seq, const Rect& roi);

}  // namespace neckvitals
