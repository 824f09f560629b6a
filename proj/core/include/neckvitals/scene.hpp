#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "neckvitals/frame.hpp"
#include "neckvitals/io.hpp"

namespace neckvitals {

/// Material, illumination, and geometry constants of the skin model.
struct SceneParams {
  double ambient_product = 46.0;    // ambient intensity times ambient reflectance
  double diffuse_coeff = 0.5;
  double specular_coeff = 0.3;
  double shininess = 16.0;          // >= 1
  double source_intensity = 250.0;  // active illumination strength
  double atten_a = 1.0;             // inverse-square law a + b z + c z^2
  double atten_b = 0.0;
  double atten_c = 1.0 / (500.0 * 500.0);
  double theta0 = 0.6;              // carotid influence half-angle, radians
  double neck_radius = 60.0;        // mm
  double deform_gain = 0.02;        // radians of surface tilt per mm of distension
  double noise_amplitude = 1.0;     // sensor quantization dither, intensity units
};

void validate_scene_params(const SceneParams& p);

/// Static pose of one rendered skin point.
struct SurfacePoint {
  double z_p = 400.0;    // camera distance, mm
  double theta_x = 0.0;  // radians, tilt in the y-z plane
  double theta_y = 0.0;  // radians, tilt in the z-x plane
  double albedo = 1.0;   // local reflectance factor on k_d and k_s (skin texture)
  bool carotid_adjacent = false;
};

/// Motion source signals sampled on the frame timestamps.
struct MotionTraces {
  std::vector<double> dz;        // mm
  std::vector<double> dtheta_x;  // radians
  std::vector<double> dtheta_y;  // radians
  std::vector<double> dr;        // mm, nonnegative
};

struct MotionSample {
  double dz = 0.0;
  double dtheta_x = 0.0;
  double dtheta_y = 0.0;
  double dr = 0.0;
};

struct MotionAmplitudes {
  double breathing_mm = 2.0;   // dz fundamental
  double bcg_ratio = 0.1;      // cardiac component of dz, relative to breathing
  double pulse_mm = 1.0;       // dr beat amplitude
  double wobble_rad = 0.002;   // band-limited tilt noise on both angles
};

/// 1/sqrt(1 + tan^2( theta_x) + tan^2(theta_y)); angles must lie in (-pi/2, pi/2).
double psi(double theta_x, double theta_y);

/// Full nonlinear shading of one point under one motion sample.
double render_point_exact(const SceneParams& scene, const SurfacePoint& pt,
                          const MotionSample& motion, double noise);

/// First-order expansion of the shading around the static pose.
double render_point_linearized(const SceneParams& scene, const SurfacePoint& pt,
                               const MotionSample& motion);

/// Breathing sinusoid plus weak cardiac component on dz, raised-cosine
/// beat train on dr, seeded band-limited noise on both tilt angles.
MotionTraces synthesize_motions(double hr_bpm, double br_bpm, const MotionAmplitudes& amp,
                                const std::vector<double>& timestamps, std::uint64_t seed);

/// Rendered patch placement plus the flat background around it. The frame is
/// much wider than the patch: the row-mean adjustment in matching relies on
/// the neck being the slimmest bright structure in its rows.
struct PatchLayout {
  int frame_width = 640;
  int frame_height = 120;
  double background_level = 21.7;
  int top = 40;
  int left = 280;
  int rows = 19;
  int cols = 81;
  std::vector<SurfacePoint> points;  // rows x cols, row-major
};

/// Cylindrical-neck patch: theta_y varies across columns, a contiguous band
/// of carotid-adjacent columns on each edge, fixed pseudo-random albedo
/// texture (seed-independent, so one template serves every run).
PatchLayout default_patch_layout(const SceneParams& p, double z_p = 400.0, int carotid_cols = 6,
                                 double texture = 0.25);

/// Renders every frame at the given timestamps; deterministic in seed.
FrameSequence simulate_sequence(const SceneParams& scene, const PatchLayout& layout,
                                const MotionTraces& motions, const std::vector<double>& timestamps,
                                std::uint64_t seed);

/// Complete closed-loop scene description.
struct SceneSpec {
  SceneParams material;
  MotionAmplitudes amplitudes;
  double hr_bpm = 70.0;
  double br_bpm = 15.0;
  double duration = 60.0;       // seconds; frames generated until t >= duration
  double nominal_fps = 62.0;
  double timing_jitter = 0.05;  // fractional frame-interval jitter
  std::uint64_t seed = 1;
  double z_p = 400.0;
  int carotid_cols = 6;
  double texture = 0.25;        // albedo variation amplitude
};

/// key=value scene description file (same dialect as the container manifest).
SceneSpec load_scene_file(const std::filesystem::path& path);
void save_scene_file(const SceneSpec& spec, const std::filesystem::path& path);

/// Jittered ~fps timestamps from 0 until duration is reached, microsecond
/// quantized, strictly increasing.
std::vector<double> make_timestamps(double duration, double fps, double jitter,
                                    std::uint64_t seed);

struct SimulationResult {
  FrameSequence sequence;
  GroundTruthTrace truth;
  MotionTraces motions;
};

/// Renders the scene and tabulates commanded per-window rates.
SimulationResult run_scene(const SceneSpec& spec, const TimeWindow& window_cfg = TimeWindow{});

}  // namespace neckvitals
