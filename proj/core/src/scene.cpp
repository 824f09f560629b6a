#include "neckvitals/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "neckvitals/errors.hpp"

namespace neckvitals {

namespace {

// splitmix64 finalizer; every random draw in the simulator funnels through
// counter-based calls to this, so serial and parallel renders agree bitwise.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// [0, 1)
double unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

std::uint64_t hash2(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed ^ mix64(a + 1)) ^ mix64(b + 0x632be59bd9b4e019ull));
}

double pow_alpha(double base, double alpha) {
  double n = 0.0;
  if (alpha >= 0.0 && alpha <= 64.0 && std::modf(alpha, &n) == 0.0) {
    double acc = 1.0;
    double sq = base;
    for (auto k = static_cast<unsigned>(n); k != 0; k >>= 1) {
      if (k & 1u) acc *= sq;
      sq *= sq;
    }
    return acc;
  }
  return std::pow(base, alpha);
}

void require_tilt(double theta, const char* which) {
  if (!(std::abs(theta) < std::numbers::pi / 2.0)) {
    throw ValidationError(std::string(which) + " tilt must lie strictly inside (-pi/2, pi/2)");
  }
}

double attenuated_intensity(const SceneParams& p, double z) {
  const double denom = p.atten_a + p.atten_b * z + p.atten_c * z * z;
  if (!(denom > 0.0)) {
    throw NumericError("attenuation denominator is not positive");
  }
  return p.source_intensity / denom;
}

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string(name) + " must be finite and nonnegative");
  }
}

}  // namespace

void validate_scene_params(const SceneParams& p) {
  require_finite_nonneg(p.ambient_product, "ambient_product");
  require_finite_nonneg(p.diffuse_coeff, "diffuse_coeff");
  require_finite_nonneg(p.specular_coeff, "specular_coeff");
  require_finite_nonneg(p.source_intensity, "source_intensity");
  require_finite_nonneg(p.deform_gain, "deform_gain");
  require_finite_nonneg(p.noise_amplitude, "noise_amplitude");
  if (!std::isfinite(p.shininess) || p.shininess < 1.0) {
    throw ValidationError("shininess must be >= 1");
  }
  if (!(p.theta0 > 0.0) || !(p.theta0 < std::numbers::pi / 2.0)) {
    throw ValidationError("theta0 must lie in (0, pi/2)");
  }
  if (!(p.neck_radius > 0.0)) {
    throw ValidationError("neck_radius must be positive");
  }
  if (!std::isfinite(p.atten_a) || !std::isfinite(p.atten_b) || !std::isfinite(p.atten_c)) {
    throw ValidationError("attenuation coefficients must be finite");
  }
}

double psi(double theta_x, double theta_y) {
  require_tilt(theta_x, "theta_x");
  require_tilt(theta_y, "theta_y");
  const double tx = std::tan(theta_x);
  const double ty = std::tan(theta_y);
  return 1.0 / std::sqrt(1.0 + tx * tx + ty * ty);
}

double render_point_exact(const SceneParams& scene, const SurfacePoint& pt,
                          const MotionSample& motion, double noise) {
  const double theta_x = pt.theta_x + motion.dtheta_x;
  const double theta_y =
      pt.theta_y + motion.dtheta_y -
      (pt.carotid_adjacent ? scene.deform_gain * motion.dr : 0.0);
  const double shading = psi(theta_x, theta_y);
  const double incident = attenuated_intensity(scene, pt.z_p + motion.dz);
  return scene.ambient_product +
         incident * pt.albedo *
             (scene.diffuse_coeff * shading +
              scene.specular_coeff * pow_alpha(shading, scene.shininess)) +
         noise;
}

double render_point_linearized(const SceneParams& scene, const SurfacePoint& pt,
                               const MotionSample& motion) {
  require_tilt(pt.theta_x, "theta_x");
  require_tilt(pt.theta_y, "theta_y");
  const double denom = scene.atten_a + scene.atten_b * pt.z_p + scene.atten_c * pt.z_p * pt.z_p;
  if (!(denom > 0.0)) {
    throw NumericError("attenuation denominator is not positive");
  }
  const double b = pt.albedo * scene.source_intensity / denom;
  const double b_prime = -pt.albedo * scene.source_intensity *
                         (scene.atten_b + 2.0 * scene.atten_c * pt.z_p) / (denom * denom);

  const double tx = std::tan(pt.theta_x);
  const double ty = std::tan(pt.theta_y);
  const double shading = 1.0 / std::sqrt(1.0 + tx * tx + ty * ty);
  const double shading_alpha = pow_alpha(shading, scene.shininess);
  const double shading3 = shading * shading * shading;
  const double dpsi_dx = -shading3 * tx * (1.0 + tx * tx);
  const double dpsi_dy = -shading3 * ty * (1.0 + ty * ty);
  const double angle_gain =
      scene.diffuse_coeff +
      scene.specular_coeff * scene.shininess * pow_alpha(shading, scene.shininess - 1.0);

  double value = scene.ambient_product + scene.diffuse_coeff * b * shading +
                 scene.specular_coeff * b * shading_alpha;
  value += (scene.diffuse_coeff * b_prime * shading +
            scene.specular_coeff * b_prime * shading_alpha) *
           motion.dz;
  value += b * dpsi_dx * angle_gain * motion.dtheta_x;
  value += b * dpsi_dy * angle_gain * motion.dtheta_y;
  if (pt.carotid_adjacent) {
    value -= scene.deform_gain * b * dpsi_dy * angle_gain * motion.dr;
  }
  return value;
}

MotionTraces synthesize_motions(double hr_bpm, double br_bpm, const MotionAmplitudes& amp,
                                const std::vector<double>& timestamps, std::uint64_t seed) {
  if (!(hr_bpm >= 45.0 && hr_bpm <= 150.0)) {
    throw ValidationError("heart rate must lie in [45, 150] bpm");
  }
  if (!(br_bpm >= 4.8 && br_bpm <= 30.0)) {
    throw ValidationError("breathing rate must lie in [4.8, 30] bpm");
  }
  const double f_hr = hr_bpm / 60.0;
  const double f_br = br_bpm / 60.0;
  const std::size_t n = timestamps.size();
  const double two_pi = 2.0 * std::numbers::pi;

  MotionTraces traces;
  traces.dz.resize(n);
  traces.dtheta_x.resize(n);
  traces.dtheta_y.resize(n);
  traces.dr.resize(n);

  constexpr int kWobbleTones = 8;
  struct Tone {
    double freq, phase;
  };
  Tone tones[2][kWobbleTones];
  for (int axis = 0; axis < 2; ++axis) {
    for (int k = 0; k < kWobbleTones; ++k) {
      const std::uint64_t h = hash2(seed, static_cast<std::uint64_t>(axis) + 11,
                                    static_cast<std::uint64_t>(k));
      // Postural sway sits well below the cardiac band.
      tones[axis][k].freq = 0.05 + 0.55 * unit_double(h);
      tones[axis][k].phase = two_pi * unit_double(mix64(h));
    }
  }
  const double tone_amp = amp.wobble_rad / std::sqrt(static_cast<double>(kWobbleTones));

  constexpr double kBeatDuty = 0.3;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = timestamps[i];
    traces.dz[i] = amp.breathing_mm * std::sin(two_pi * f_br * t) +
                   amp.breathing_mm * amp.bcg_ratio * std::sin(two_pi * f_hr * t);
    double beat_pos = f_hr * t;
    beat_pos -= std::floor(beat_pos);
    traces.dr[i] = beat_pos < kBeatDuty
                       ? amp.pulse_mm * 0.5 * (1.0 - std::cos(two_pi * beat_pos / kBeatDuty))
                       : 0.0;
    double wob[2] = {0.0, 0.0};
    for (int axis = 0; axis < 2; ++axis) {
      for (int k = 0; k < kWobbleTones; ++k) {
        wob[axis] += std::sin(two_pi * tones[axis][k].freq * t + tones[axis][k].phase);
      }
    }
    traces.dtheta_x[i] = tone_amp * wob[0];
    traces.dtheta_y[i] = tone_amp * wob[1];
  }
  return traces;
}

PatchLayout default_patch_layout(const SceneParams& p, double z_p, int carotid_cols,
                                 double texture) {
  PatchLayout layout;
  const int rows = layout.rows;
  const int cols = layout.cols;
  if (carotid_cols < 0 || 2 * carotid_cols > cols) {
    throw ValidationError("carotid column band does not fit the patch");
  }
  if (!(texture >= 0.0) || !(texture < 1.0)) {
    throw ValidationError("texture amplitude must lie in [0, 1)");
  }
  layout.points.resize(static_cast<std::size_t>(rows) * cols);
  const double col_center = (cols - 1) / 2.0;
  const double row_center = (rows - 1) / 2.0;
  const double edge_tilt = 0.5;  // radians at the outermost columns
  const double half_width = p.neck_radius * std::sin(edge_tilt);
  constexpr std::uint64_t kTextureKey = 0x736b696e746578ull;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      SurfacePoint& pt = layout.points[static_cast<std::size_t>(i) * cols + j];
      const double x = (j - col_center) / col_center * half_width;
      pt.theta_y = std::asin(x / p.neck_radius);
      pt.theta_x = 0.08 * (i - row_center) / row_center;
      pt.z_p = z_p + p.neck_radius * (1.0 - std::cos(pt.theta_y));
      pt.albedo = 1.0 + texture * (2.0 * unit_double(hash2(kTextureKey,
                                                           static_cast<std::uint64_t>(i),
                                                           static_cast<std::uint64_t>(j))) -
                                   1.0);
      pt.carotid_adjacent = j < carotid_cols || j >= cols - carotid_cols;
    }
  }
  return layout;
}

namespace {

// Steps of the background-byte map m -> byte (see simulate_sequence). The
// table always carries consecutive byte values, so a pixel's byte is the base
// plus the count of thresholds at or below its draw. Both kernel builds are
// integer-only and produce identical bytes; the wide one retires more lanes
// per cycle on machines that have the instructions.
#define NECKVITALS_FILL_BODY                                                   \
  const std::uint64_t t0 = t[0], t1 = t[1], t2 = t[2], t3 = t[3];              \
  for (std::size_t p = 0; p < count; ++p) {                                    \
    const std::uint64_t m = mix64(frame_key ^ keys[p]) >> 11;                  \
    const unsigned b = base + (m >= t0) + (m >= t1) + (m >= t2) + (m >= t3);   \
    px[p] = static_cast<std::uint8_t>(b);                                      \
  }

__attribute__((target("avx512f,avx512dq,avx512bw,avx512vl"))) void fill_background_wide(
    std::uint8_t* __restrict px, const std::uint64_t* __restrict keys, std::size_t count,
    std::uint64_t frame_key, unsigned base, const std::uint64_t t[4]) {
  NECKVITALS_FILL_BODY
}

void fill_background_scalar(std::uint8_t* __restrict px, const std::uint64_t* __restrict keys,
                            std::size_t count, std::uint64_t frame_key, unsigned base,
                            const std::uint64_t t[4]) {
  NECKVITALS_FILL_BODY
}

#undef NECKVITALS_FILL_BODY

}  // namespace

FrameSequence simulate_sequence(const SceneParams& scene, const PatchLayout& layout,
                                const MotionTraces& motions, const std::vector<double>& timestamps,
                                std::uint64_t seed) {
  validate_scene_params(scene);
  const std::size_t n = timestamps.size();
  if (n < 2) {
    throw ValidationError("at least two frames are required");
  }
  if (motions.dz.size() != n || motions.dtheta_x.size() != n || motions.dtheta_y.size() != n ||
      motions.dr.size() != n) {
    throw ValidationError("motion traces must match the timestamp count");
  }
  const int w = layout.frame_width;
  const int h = layout.frame_height;
  if (layout.top < 0 || layout.left < 0 || layout.top + layout.rows > h ||
      layout.left + layout.cols > w) {
    throw ValidationError("patch does not fit inside the frame");
  }
  if (layout.points.size() != static_cast<std::size_t>(layout.rows) * layout.cols) {
    throw ValidationError("patch point count does not match its dimensions");
  }

  const double q = scene.noise_amplitude;
  // mix64(frame_key ^ pixel_key[p]) expands to hash2(seed, f, p); the split hoists
  // the per-pixel half of the hash out of the frame loop.
  std::vector<std::uint64_t> pixel_key;
  if (q != 0.0) {
    pixel_key.resize(static_cast<std::size_t>(w) * h);
    for (std::size_t p = 0; p < pixel_key.size(); ++p) {
      pixel_key[p] = mix64(p + 0x632be59bd9b4e019ull);
    }
  }
  auto quantize = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
  };

  // The background byte depends on the draw only through the hash's top 53
  // bits, and the map m -> byte is nondecreasing, so its few step points can
  // be found once by bisection; the fill loop then needs no rounding chain.
  struct NoiseStep {
    std::uint64_t first_m;
    std::uint8_t byte;
  };
  std::vector<NoiseStep> steps;
  if (q != 0.0) {
    const auto byte_of = [&](std::uint64_t m) {
      return quantize(layout.background_level +
                      q * (static_cast<double>(m) * 0x1.0p-53 - 0.5));
    };
    constexpr std::uint64_t kLastM = (1ull << 53) - 1;
    std::uint64_t cur = 0;
    std::uint8_t cur_byte = byte_of(0);
    steps.push_back({cur, cur_byte});
    while (cur_byte != byte_of(kLastM)) {
      std::uint64_t a = cur, b = kLastM;
      while (b - a > 1) {
        const std::uint64_t mid = a + (b - a) / 2;
        (byte_of(mid) > cur_byte ? b : a) = mid;
      }
      cur = b;
      cur_byte = byte_of(b);
      steps.push_back({cur, cur_byte});
    }
  }
  // Realistic amplitudes cross a handful of levels, all consecutive; pad the
  // thresholds to a fixed four (a draw never reaches 2^53) for the kernels.
  bool fixed_steps = steps.size() <= 5;
  for (std::size_t k = 0; fixed_steps && k < steps.size(); ++k) {
    fixed_steps = steps[k].byte == static_cast<std::uint8_t>(steps.front().byte + k);
  }
  std::uint64_t pad[4] = {~0ull, ~0ull, ~0ull, ~0ull};
  for (std::size_t k = 1; fixed_steps && k < steps.size(); ++k) pad[k - 1] = steps[k].first_m;
  const bool wide_ok = __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
                       __builtin_cpu_supports("avx512bw") && __builtin_cpu_supports("avx512vl");
  const auto fill_background = wide_ok ? fill_background_wide : fill_background_scalar;

  FrameSequence seq;
  seq.timestamps = timestamps;
  seq.nominal_rate =
      static_cast<double>(n - 1) / (timestamps.back() - timestamps.front());
  seq.frames.reserve(n);
  const std::uint8_t flat_background = quantize(layout.background_level);
  for (std::size_t f = 0; f < n; ++f) {
    Frame frame = make_frame(w, h);
    const MotionSample motion{motions.dz[f], motions.dtheta_x[f], motions.dtheta_y[f],
                              motions.dr[f]};
    const std::uint64_t frame_key = mix64(seed ^ mix64(f + 1));
    auto noise_at = [&](std::size_t pixel) {
      if (q == 0.0) return 0.0;
      return q * (unit_double(mix64(frame_key ^ pixel_key[pixel])) - 0.5);
    };
    if (q == 0.0) {
      std::fill(frame.pixels.begin(), frame.pixels.end(), flat_background);
    } else if (fixed_steps) {
      fill_background(frame.pixels.data(), pixel_key.data(), frame.pixels.size(), frame_key,
                      steps.front().byte, pad);
    } else {
      for (std::size_t pixel = 0; pixel < frame.pixels.size(); ++pixel) {
        const std::uint64_t m = mix64(frame_key ^ pixel_key[pixel]) >> 11;
        std::size_t si = steps.size() - 1;
        while (steps[si].first_m > m) --si;
        frame.pixels[pixel] = steps[si].byte;
      }
    }
    for (int i = 0; i < layout.rows; ++i) {
      for (int j = 0; j < layout.cols; ++j) {
        const SurfacePoint& pt = layout.points[static_cast<std::size_t>(i) * layout.cols + j];
        const std::size_t pixel =
            static_cast<std::size_t>(layout.top + i) * w + (layout.left + j);
        frame.pixels[pixel] = quantize(render_point_exact(scene, pt, motion, noise_at(pixel)));
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

std::vector<double> make_timestamps(double duration, double fps, double jitter,
                                    std::uint64_t seed) {
  if (!(duration > 0.0) || !(fps > 0.0)) {
    throw ValidationError("duration and frame rate must be positive");
  }
  if (!(jitter >= 0.0) || !(jitter < 1.0)) {
    throw ValidationError("timing jitter must lie in [0, 1)");
  }
  std::vector<double> times;
  times.push_back(0.0);
  const double base = 1.0 / fps;
  double t = 0.0;
  for (std::uint64_t i = 0; times.back() < duration; ++i) {
    const double u = 2.0 * unit_double(hash2(seed, 0x7469636bull, i)) - 1.0;
    t += base * (1.0 + jitter * u);
    times.push_back(std::round(t * 1e6) / 1e6);
  }
  return times;
}

SceneSpec load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open scene file: " + path.string());
  }
  SceneSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("scene file line " + std::to_string(line_no) + " is not key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    double num = 0.0;
    try {
      std::size_t used = 0;
      num = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw IoError("scene file value for '" + key + "' is not numeric");
    }
    if (key == "ambient_product") spec.material.ambient_product = num;
    else if (key == "diffuse_coeff") spec.material.diffuse_coeff = num;
    else if (key == "specular_coeff") spec.material.specular_coeff = num;
    else if (key == "shininess") spec.material.shininess = num;
    else if (key == "source_intensity") spec.material.source_intensity = num;
    else if (key == "atten_a") spec.material.atten_a = num;
    else if (key == "atten_b") spec.material.atten_b = num;
    else if (key == "atten_c") spec.material.atten_c = num;
    else if (key == "theta0") spec.material.theta0 = num;
    else if (key == "neck_radius") spec.material.neck_radius = num;
    else if (key == "deform_gain") spec.material.deform_gain = num;
    else if (key == "noise_amplitude") spec.material.noise_amplitude = num;
    else if (key == "breathing_mm") spec.amplitudes.breathing_mm = num;
    else if (key == "bcg_ratio") spec.amplitudes.bcg_ratio = num;
    else if (key == "pulse_mm") spec.amplitudes.pulse_mm = num;
    else if (key == "wobble_rad") spec.amplitudes.wobble_rad = num;
    else if (key == "hr_bpm") spec.hr_bpm = num;
    else if (key == "br_bpm") spec.br_bpm = num;
    else if (key == "duration") spec.duration = num;
    else if (key == "fps") spec.nominal_fps = num;
    else if (key == "jitter") spec.timing_jitter = num;
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(num);
    else if (key == "z_p") spec.z_p = num;
    else if (key == "carotid_cols") spec.carotid_cols = static_cast<int>(num);
    else if (key == "texture") spec.texture = num;
    else throw ValidationError("unknown scene file key: " + key);
  }
  return spec;
}

void save_scene_file(const SceneSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write scene file: " + path.string());
  }
  auto put = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
  };
  put("ambient_product", spec.material.ambient_product);
  put("diffuse_coeff", spec.material.diffuse_coeff);
  put("specular_coeff", spec.material.specular_coeff);
  put("shininess", spec.material.shininess);
  put("source_intensity", spec.material.source_intensity);
  put("atten_a", spec.material.atten_a);
  put("atten_b", spec.material.atten_b);
  put("atten_c", spec.material.atten_c);
  put("theta0", spec.material.theta0);
  put("neck_radius", spec.material.neck_radius);
  put("deform_gain", spec.material.deform_gain);
  put("noise_amplitude", spec.material.noise_amplitude);
  put("breathing_mm", spec.amplitudes.breathing_mm);
  put("bcg_ratio", spec.amplitudes.bcg_ratio);
  put("pulse_mm", spec.amplitudes.pulse_mm);
  put("wobble_rad", spec.amplitudes.wobble_rad);
  put("hr_bpm", spec.hr_bpm);
  put("br_bpm", spec.br_bpm);
  put("duration", spec.duration);
  put("fps", spec.nominal_fps);
  put("jitter", spec.timing_jitter);
  out << "seed=" << spec.seed << '\n';
  put("z_p", spec.z_p);
  put("carotid_cols", spec.carotid_cols);
  put("texture", spec.texture);
  if (!out) {
    throw IoError("failed writing scene file: " + path.string());
  }
}

SimulationResult run_scene(const SceneSpec& spec, const TimeWindow& window_cfg) {
  validate_scene_params(spec.material);
  const std::vector<double> times =
      make_timestamps(spec.duration, spec.nominal_fps, spec.timing_jitter, spec.seed);
  SimulationResult result;
  result.motions = synthesize_motions(spec.hr_bpm, spec.br_bpm, spec.amplitudes, times,
                                      mix64(spec.seed ^ 0x6d6f74696f6e21ull));
  const PatchLayout layout =
      default_patch_layout(spec.material, spec.z_p, spec.carotid_cols, spec.texture);
  result.sequence = simulate_sequence(spec.material, layout, result.motions, times, spec.seed);

  TimeWindow cfg = window_cfg;
  cfg.start = times.front();
  const auto placements = windows(times.back() - times.front(), cfg);
  result.truth.window_starts.reserve(placements.size());
  for (const TimeWindow& win : placements) {
    result.truth.window_starts.push_back(win.start);
  }
  result.truth.hr_bpm.assign(placements.size(), spec.hr_bpm);
  result.truth.br_bpm.assign(placements.size(), spec.br_bpm);
  return result;
}

}  // namespace neckvitals
