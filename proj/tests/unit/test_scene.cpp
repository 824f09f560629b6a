#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "neckvitals/errors.hpp"
#include "neckvitals/imaging.hpp"
#include "neckvitals/scene.hpp"
#include "neckvitals/spectral.hpp"

using namespace neckvitals;
namespace fs = std::filesystem;

namespace {

double argmax_freq(const Spectrum& sp) {
  const auto it = std::max_element(sp.power.begin(), sp.power.end());
  return sp.freqs[static_cast<std::size_t>(it - sp.power.begin())];
}

SurfacePoint sample_point(double theta_x = 0.05, double theta_y = 0.3, bool carotid = false,
                          double albedo = 1.1) {
  SurfacePoint pt;
  pt.z_p = 400.0;
  pt.theta_x = theta_x;
  pt.theta_y = theta_y;
  pt.albedo = albedo;
  pt.carotid_adjacent = carotid;
  return pt;
}

}  // namespace

TEST_SUITE("scene-sim") {

TEST_CASE("surface orientation factor") {
  CHECK(psi(0.0, 0.0) == 1.0);
  CHECK(psi(std::numbers::pi / 4.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  testutil::Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-1.2, 1.2);
    const double b = rng.uniform(-1.2, 1.2);
    CHECK(psi(a, b) == doctest::Approx(psi(b, a)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(psi(std::numbers::pi / 2.0, 0.0), ValidationError);
  CHECK_THROWS_AS(psi(0.0, -std::numbers::pi / 2.0), ValidationError);
}

TEST_CASE("stationary shading is ambient plus attenuated reflection") {
  const SceneParams p;
  const SurfacePoint pt = sample_point();
  const double out = render_point_exact(p, pt, MotionSample{}, 0.0);

  const double att = p.source_intensity / (p.atten_a + p.atten_b * pt.z_p + p.atten_c * pt.z_p * pt.z_p);
  const double o = psi(pt.theta_x, pt.theta_y);
  const double expected =
      p.ambient_product +
      att * pt.albedo * (p.diffuse_coeff * o + p.specular_coeff * std::pow(o, p.shininess));
  CHECK(out == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("without reflection coefficients only ambient light remains") {
  SceneParams p;
  p.diffuse_coeff = 0.0;
  p.specular_coeff = 0.0;
  const SurfacePoint pt = sample_point(0.02, -0.4, true);
  testutil::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    MotionSample m;
    m.dz = rng.uniform(-30.0, 30.0);
    m.dtheta_x = rng.uniform(-0.3, 0.3);
    m.dtheta_y = rng.uniform(-0.3, 0.3);
    m.dr = rng.uniform(0.0, 2.0);
    CHECK(render_point_exact(p, pt, m, 0.0) == p.ambient_product);
  }
}

TEST_CASE("intensity falls off with distance") {
  const SceneParams p;
  const SurfacePoint pt = sample_point();

  MotionSample far;
  far.dz = 0.1 * pt.z_p;
  CHECK(render_point_exact(p, pt, far, 0.0) < render_point_exact(p, pt, MotionSample{}, 0.0));

  double prev = std::numeric_limits<double>::infinity();
  for (double dz = -100.0; dz <= 300.0; dz += 20.0) {
    MotionSample m;
    m.dz = dz;
    const double v = render_point_exact(p, pt, m, 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("linearization is exact for the static pose") {
  const SceneParams p;
  for (const SurfacePoint& pt :
       {sample_point(), sample_point(-0.06, 0.45, true, 0.8), sample_point(0.0, 0.0, false, 1.25)}) {
    CHECK(render_point_linearized(p, pt, MotionSample{}) ==
          doctest::Approx(render_point_exact(p, pt, MotionSample{}, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("distension only reaches carotid-adjacent points") {
  const SceneParams p;
  const SurfacePoint plain = sample_point(0.05, 0.35, false);
  const SurfacePoint carotid = sample_point(0.05, 0.35, true);
  const double base_exact = render_point_exact(p, plain, MotionSample{}, 0.0);
  const double base_lin = render_point_linearized(p, plain, MotionSample{});
  for (double dr : {0.2, 0.7, 1.4}) {
    MotionSample m;
    m.dr = dr;
    CHECK(render_point_exact(p, plain, m, 0.0) == base_exact);
    CHECK(render_point_linearized(p, plain, m) == base_lin);
    CHECK(render_point_exact(p, carotid, m, 0.0) != base_exact);
  }
}

TEST_CASE("linearization residual shrinks quadratically") {
  const SceneParams p;
  testutil::Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const double tilt_x = rng.uniform(-0.06, 0.06);
    const double tilt_y = rng.uniform(-0.45, 0.45);
    const double albedo = rng.uniform(0.8, 1.2);
    const SurfacePoint pt = sample_point(tilt_x, tilt_y, trial % 2 == 1, albedo);
    MotionSample dir;
    dir.dz = rng.uniform(-1.0, 1.0);
    dir.dtheta_x = rng.uniform(-1.0, 1.0) * 2.5e-3;
    dir.dtheta_y = rng.uniform(-1.0, 1.0) * 2.5e-3;
    dir.dr = pt.carotid_adjacent ? rng.uniform(0.0, 1.0) : 0.0;

    auto residual = [&](double eps) {
      MotionSample m;
      m.dz = eps * dir.dz;
      m.dtheta_x = eps * dir.dtheta_x;
      m.dtheta_y = eps * dir.dtheta_y;
      m.dr = eps * dir.dr;
      return std::abs(render_point_exact(p, pt, m, 0.0) - render_point_linearized(p, pt, m));
    };
    const double r1 = residual(0.25);
    const double r2 = residual(0.125);
    if (r1 < 1e-8) continue;  // degenerate direction
    CAPTURE(trial);
    const double ratio = r1 / r2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("motion traces place their fundamentals") {
  const std::vector<double> t = testutil::uniform_times(62.0, 3720);
  const MotionTraces traces = synthesize_motions(70.0, 15.0, MotionAmplitudes{}, t, 5);

  const std::vector<double> grid = freq_grid(31.0, 0.005);
  const Spectrum dz = lomb_scargle(traces.dz, t, grid);
  CHECK(argmax_freq(dz) == doctest::Approx(0.25).epsilon(1e-9));
  const Spectrum dr = lomb_scargle(traces.dr, t, grid);
  CHECK(std::abs(argmax_freq(dr) - 70.0 / 60.0) <= 0.005 + 1e-12);
}

TEST_CASE("zero amplitudes produce zero motion") {
  const std::vector<double> t = testutil::uniform_times(62.0, 200);
  MotionAmplitudes amp;
  amp.breathing_mm = 0.0;
  amp.bcg_ratio = 0.0;
  amp.pulse_mm = 0.0;
  amp.wobble_rad = 0.0;
  const MotionTraces traces = synthesize_motions(70.0, 15.0, amp, t, 5);
  for (double v : traces.dz) CHECK(v == 0.0);
  for (double v : traces.dr) CHECK(v == 0.0);
  for (double v : traces.dtheta_x) CHECK(v == 0.0);
  for (double v : traces.dtheta_y) CHECK(v == 0.0);
}

TEST_CASE("zero cardiac coupling leaves no heart line in dz") {
  const std::vector<double> t = make_timestamps(60.0, 62.0, 0.05, 21);
  MotionAmplitudes amp;
  amp.bcg_ratio = 0.0;
  const MotionTraces with = synthesize_motions(72.0, 15.0, MotionAmplitudes{}, t, 5);
  const MotionTraces without = synthesize_motions(72.0, 15.0, amp, t, 5);

  const std::vector<double> grid = freq_grid(31.0, 0.005);
  const Spectrum sp_with = lomb_scargle(with.dz, t, grid);
  const Spectrum sp_without = lomb_scargle(without.dz, t, grid);
  const std::size_t hr_bin = static_cast<std::size_t>(std::lround(1.2 / 0.005)) - 1;
  const double breathing_peak = sp_without.power[static_cast<std::size_t>(std::lround(0.25 / 0.005)) - 1];
  CHECK(sp_without.power[hr_bin] < 1e-3 * breathing_peak);
  CHECK(sp_with.power[hr_bin] > 1e2 * sp_without.power[hr_bin]);
}

TEST_CASE("rates outside the physiological bands are rejected") {
  const std::vector<double> t = testutil::uniform_times(62.0, 100);
  CHECK_THROWS_AS(synthesize_motions(200.0, 15.0, MotionAmplitudes{}, t, 1), ValidationError);
  CHECK_THROWS_AS(synthesize_motions(30.0, 15.0, MotionAmplitudes{}, t, 1), ValidationError);
  CHECK_THROWS_AS(synthesize_motions(70.0, 3.0, MotionAmplitudes{}, t, 1), ValidationError);
  CHECK_THROWS_AS(synthesize_motions(70.0, 40.0, MotionAmplitudes{}, t, 1), ValidationError);
}

TEST_CASE("simulation is a pure function of the seed") {
  SceneSpec spec;
  spec.duration = 2.0;
  spec.seed = 42;
  const SimulationResult a = run_scene(spec, TimeWindow{0.0, 1.0, 1.0});
  const SimulationResult b = run_scene(spec, TimeWindow{0.0, 1.0, 1.0});
  REQUIRE(a.sequence.size() == b.sequence.size());
  for (std::size_t f = 0; f < a.sequence.size(); ++f)
    REQUIRE(a.sequence.frames[f].pixels == b.sequence.frames[f].pixels);
  CHECK(a.sequence.timestamps == b.sequence.timestamps);

  spec.seed = 43;
  const SimulationResult c = run_scene(spec, TimeWindow{0.0, 1.0, 1.0});
  bool any_diff = false;
  for (std::size_t f = 0; f < a.sequence.size() && !any_diff; ++f)
    any_diff = a.sequence.frames[f].pixels != c.sequence.frames[f].pixels;
  CHECK(any_diff);
}

TEST_CASE("a still noiseless scene renders identical frames") {
  SceneSpec spec;
  spec.duration = 1.0;
  spec.material.noise_amplitude = 0.0;
  spec.amplitudes = MotionAmplitudes{0.0, 0.0, 0.0, 0.0};
  const SimulationResult r = run_scene(spec, TimeWindow{0.0, 0.5, 1.0});
  for (std::size_t f = 1; f < r.sequence.size(); ++f)
    REQUIRE(r.sequence.frames[f].pixels == r.sequence.frames[0].pixels);
}

TEST_CASE("patch mean tracks whole-neck translation") {
  SceneSpec spec;
  spec.duration = 10.0;
  spec.amplitudes.pulse_mm = 0.0;
  spec.amplitudes.wobble_rad = 0.0;
  const SimulationResult r = run_scene(spec, TimeWindow{0.0, 5.0, 1.0});

  const PatchLayout layout = default_patch_layout(spec.material);
  const auto [mean, times] =
      spatial_average(r.sequence, Rect{layout.top, layout.left, layout.rows, layout.cols});
  CHECK(times == r.sequence.timestamps);
  CHECK(std::abs(testutil::pearson(mean, r.motions.dz)) > 0.99);
}

TEST_CASE("timestamps are jittered, quantized, increasing") {
  const std::vector<double> t = make_timestamps(10.0, 62.0, 0.05, 7);
  REQUIRE(t.size() > 600);
  CHECK(t.front() == 0.0);
  CHECK(t.back() >= 10.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double scaled = t[i] * 1e6;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-6);
  }
  const double lo = (1.0 - 0.05) / 62.0 - 2e-6;
  const double hi = (1.0 + 0.05) / 62.0 + 2e-6;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    CHECK(dt >= lo);
    CHECK(dt <= hi);
  }
}

TEST_CASE("scene files round trip") {
  const fs::path dir = fs::temp_directory_path() / "neckvitals_test_scene";
  fs::create_directories(dir);
  SceneSpec spec;
  spec.hr_bpm = 62.5;
  spec.br_bpm = 11.25;
  spec.material.ambient_product = 12.0;
  spec.amplitudes.wobble_rad = 0.004;
  spec.seed = 99;
  spec.texture = 0.3;
  save_scene_file(spec, dir / "scene.txt");
  const SceneSpec back = load_scene_file(dir / "scene.txt");
  CHECK(back.hr_bpm == spec.hr_bpm);
  CHECK(back.br_bpm == spec.br_bpm);
  CHECK(back.material.ambient_product == spec.material.ambient_product);
  CHECK(back.amplitudes.wobble_rad == spec.amplitudes.wobble_rad);
  CHECK(back.seed == spec.seed);
  CHECK(back.texture == spec.texture);

  {
    std::ofstream out(dir / "unknown.txt");
    out << "hr_bpm=70\nmystery=1\n";
  }
  CHECK_THROWS_AS(load_scene_file(dir / "unknown.txt"), ValidationError);
  {
    std::ofstream out(dir / "nonnum.txt");
    out << "hr_bpm=fast\n";
  }
  CHECK_THROWS_AS(load_scene_file(dir / "nonnum.txt"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("commanded truth covers every analysis window") {
  SceneSpec spec;
  spec.hr_bpm = 58.0;
  spec.br_bpm = 19.0;
  const SimulationResult r = run_scene(spec);
  REQUIRE(r.truth.window_starts.size() == 31);
  CHECK(r.truth.window_starts.front() == doctest::Approx(0.0));
  CHECK(r.truth.window_starts.back() == doctest::Approx(30.0));
  for (double v : r.truth.hr_bpm) CHECK(v == 58.0);
  for (double v : r.truth.br_bpm) CHECK(v == 19.0);
}

TEST_CASE("patch layout carotid bands and texture") {
  const SceneParams p;
  const PatchLayout layout = default_patch_layout(p, 400.0, 6, 0.25);
  REQUIRE(layout.points.size() == static_cast<std::size_t>(layout.rows) * layout.cols);
  for (int i = 0; i < layout.rows; ++i) {
    for (int j = 0; j < layout.cols; ++j) {
      const SurfacePoint& pt = layout.points[static_cast<std::size_t>(i) * layout.cols + j];
      CHECK(pt.carotid_adjacent == (j < 6 || j >= layout.cols - 6));
      CHECK(pt.albedo >= 0.75);
      CHECK(pt.albedo < 1.25);
      CHECK(std::abs(pt.theta_y) <= 0.5 + 1e-12);
    }
  }
  // The texture is a fixed property of the patch, not of any seed.
  const PatchLayout again = default_patch_layout(p, 400.0, 6, 0.25);
  for (std::size_t k = 0; k < layout.points.size(); ++k)
    CHECK(layout.points[k].albedo == again.points[k].albedo);

  CHECK_THROWS_AS(default_patch_layout(p, 400.0, 41), ValidationError);
  CHECK_THROWS_AS(default_patch_layout(p, 400.0, 6, 1.0), ValidationError);
}

}  // TEST_SUITE
