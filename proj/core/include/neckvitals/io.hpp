#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "neckvitals/frame.hpp"

namespace neckvitals {

/// On-disk sequence container: a directory holding
///   manifest.txt    key=value lines: width, height, frames, format=gray8
///   frames.bin      width*height*frames bytes, frame-major, row-major
///   timestamps.txt  one decimal seconds value per line (microsecond precision)
void save_sequence(const FrameSequence& seq, const std::filesystem::path& dir);
FrameSequence load_sequence(const std::filesystem::path& dir);

/// Rate estimates, one row per analysis window.
struct VitalTrace {
  std::vector<double> window_starts;    // seconds
  std::vector<double> rate_bpm;
  std::vector<std::string> selected;    // component label per window; empty when not applicable
};

/// CSV header `window_start_s,rate_bpm,selected` (selected column present
/// only when the trace carries labels).
void save_vital_trace(const VitalTrace& trace, const std::filesystem::path& path);
VitalTrace load_vital_trace(const std::filesystem::path& path);

/// Commanded per-window rates emitted alongside simulated sequences.
/// CSV header `window_start_s,hr_bpm,br_bpm`.
struct GroundTruthTrace {
  std::vector<double> window_starts;
  std::vector<double> hr_bpm;
  std::vector<double> br_bpm;
};
void save_ground_truth(const GroundTruthTrace& truth, const std::filesystem::path& path);
GroundTruthTrace load_ground_truth(const std::filesystem::path& path);

/// Gold-standard recording CSV with header `t,value`, t in seconds at a
/// constant rate. Throws ValidationError when the spacing is not uniform.
ReferenceRecording load_reference(const std::filesystem::path& path,
                                  ReferenceRecording::Kind kind);
void save_reference(const ReferenceRecording& rec, const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255) image file.
Frame load_pgm(const std::filesystem::path& path);
void save_pgm(const Frame& frame, const std::filesystem::path& path);

}  // namespace neckvitals
