#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "neckvitals/errors.hpp"
#include "neckvitals/scene.hpp"
#include "neckvitals/spectral.hpp"

using namespace neckvitals;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Spectrum make_spectrum(std::vector<double> freqs, std::vector<double> power) {
  Spectrum sp;
  sp.freqs = std::move(freqs);
  sp.power = std::move(power);
  sp.nyquist = sp.freqs.back();
  return sp;
}

std::size_t argmax_bin(const Spectrum& sp) {
  return static_cast<std::size_t>(
      std::max_element(sp.power.begin(), sp.power.end()) - sp.power.begin());
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("frequency grid construction") {
  const std::vector<double> grid = freq_grid(5.0, 0.005);
  REQUIRE(grid.size() == 1000);
  CHECK(grid.front() == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.005).epsilon(1e-9));

  CHECK(freq_grid(31.0, 0.005).size() == 6200);
  CHECK_THROWS_AS(freq_grid(-1.0, 0.005), ValidationError);
  CHECK_THROWS_AS(freq_grid(1.0, 2.0), ValidationError);
}

TEST_CASE("nyquist follows the median gap") {
  CHECK(nyquist_from_times(testutil::uniform_times(62.0, 100)) ==
        doctest::Approx(31.0).epsilon(1e-9));
  const std::vector<double> uneven{0.0, 0.01, 0.03, 0.06};  // gaps 10, 20, 30 ms
  CHECK(nyquist_from_times(uneven) == doctest::Approx(25.0).epsilon(1e-12));
  CHECK_THROWS_AS(nyquist_from_times({1.0}), ValidationError);
  CHECK_THROWS_AS(nyquist_from_times({0.0, 0.0, 0.1}), ValidationError);
}

TEST_CASE("band bins are a closed interval") {
  const Spectrum sp = make_spectrum(freq_grid(5.0, 0.005), std::vector<double>(1000, 1.0));
  const auto [first, last] = band_bins(sp, Band{0.75, 2.5});
  CHECK(first == 149);
  CHECK(last == 499);
  CHECK(sp.freqs[first] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(sp.freqs[last] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(last - first + 1 == 351);

  CHECK_THROWS_AS(band_bins(sp, Band{0.75, 6.0}), ValidationError);
  CHECK_THROWS_AS(band_bins(sp, Band{0.001, 0.004}), ValidationError);
  CHECK_THROWS_AS(validate_band(Band{0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(validate_band(Band{-0.1, 0.5}), ValidationError);
  CHECK(sp.step() == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("periodogram equals the direct transform on a uniform grid") {
  const std::size_t n = 64;
  const double rate = 32.0;
  testutil::Rng rng(5);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const std::vector<double> t = testutil::uniform_times(rate, n);

  const std::vector<double> grid = freq_grid(16.0, 0.5);
  REQUIRE(grid.size() == 32);
  const Spectrum sp = lomb_scargle(x, t, grid);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sigma2 = ss / (static_cast<double>(n) - 1.0);

  // The Nyquist bin itself is excluded: the sine basis vanishes there.
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = kTwoPi * grid[k] * t[j];
      re += (x[j] - mean) * std::cos(a);
      im -= (x[j] - mean) * std::sin(a);
    }
    const double direct = (re * re + im * im) / (static_cast<double>(n) * sigma2);
    CAPTURE(k);
    CHECK(sp.power[k] == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("periodogram is invariant to affine changes") {
  const std::vector<double> t = make_timestamps(10.0, 62.0, 0.05, 12);
  testutil::Rng rng(6);
  std::vector<double> x(t.size());
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] - 7.0;

  const std::vector<double> grid = freq_grid(25.0, 0.05);
  const Spectrum px = lomb_scargle(x, t, grid);
  const Spectrum py = lomb_scargle(y, t, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(py.power[k] == doctest::Approx(px.power[k]).epsilon(1e-9));
  }
}

TEST_CASE("a pure tone peaks at its own bin") {
  const std::vector<double> t = make_timestamps(30.0, 62.0, 0.05, 3);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::sin(kTwoPi * 1.23 * t[i]);
  const Spectrum sp = lomb_scargle(x, t, freq_grid(31.0, 0.005));
  CHECK(sp.freqs[argmax_bin(sp)] == doctest::Approx(1.23).epsilon(1e-12));
}

TEST_CASE("batched transform matches the one-series path") {
  const std::vector<double> t = make_timestamps(8.0, 62.0, 0.05, 9);
  testutil::Rng rng(10);
  std::vector<std::vector<double>> xs(3, std::vector<double>(t.size()));
  for (auto& x : xs)
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);

  const std::vector<double> grid = freq_grid(31.0, 0.01);
  const auto batched = lomb_scargle_multi({&xs[0], &xs[1], &xs[2]}, t, grid);
  REQUIRE(batched.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    const Spectrum single = lomb_scargle(xs[s], t, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(batched[s].power[k] == doctest::Approx(single.power[k]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(lomb_scargle_multi({}, t, grid), ValidationError);
  CHECK_THROWS_AS(lomb_scargle_multi({&xs[0], &xs[0], &xs[0], &xs[0]}, t, grid), ValidationError);
  std::vector<double> short_series(t.size() - 1);
  CHECK_THROWS_AS(lomb_scargle(short_series, t, grid), ValidationError);
  CHECK_THROWS_AS(lomb_scargle(xs[0], std::vector<double>{0.0, 0.0, 0.1, 0.2}, grid),
                  ValidationError);
  CHECK_THROWS_AS(lomb_scargle(xs[0], t, std::vector<double>{0.1, 0.2, 0.4}), ValidationError);
}

TEST_CASE("a constant series has a silent spectrum") {
  const std::vector<double> t = testutil::uniform_times(62.0, 50);
  const std::vector<double> x(t.size(), 5.0);
  const Spectrum sp = lomb_scargle(x, t, freq_grid(31.0, 0.1));
  for (double p : sp.power) CHECK(p == 0.0);
}

TEST_CASE("band power fraction") {
  const Spectrum flat = make_spectrum(freq_grid(5.0, 0.005), std::vector<double>(1000, 1.0));
  CHECK(nbp(flat, Band{0.75, 2.5}) == doctest::Approx(0.351).epsilon(1e-12));

  std::vector<double> inside(1000, 0.0);
  for (std::size_t i = 149; i <= 499; ++i) inside[i] = 2.5;
  CHECK(nbp(make_spectrum(freq_grid(5.0, 0.005), inside), Band{0.75, 2.5}) == 1.0);

  const Spectrum silent = make_spectrum(freq_grid(5.0, 0.005), std::vector<double>(1000, 0.0));
  CHECK(nbp(silent, Band{0.75, 2.5}) == 0.0);
}

TEST_CASE("band kurtosis hand values") {
  const Band whole{0.5, 2.0};
  CHECK(band_kurtosis(make_spectrum({1.0, 2.0}, {4.0, 0.0}), whole,
                      KurtosisWeighting::kFrequency) == doctest::Approx(1.5).epsilon(1e-9));
  const Band wide{0.5, 3.0};
  CHECK(band_kurtosis(make_spectrum({1.0, 2.0, 3.0}, {7.0, 7.0, 3.0}), wide,
                      KurtosisWeighting::kFrequency) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(band_kurtosis(make_spectrum({1.0, 2.0}, {4.0, 4.0}), whole,
                                KurtosisWeighting::kFrequency),
                  NumericError);

  CHECK(band_kurtosis(make_spectrum({1.0, 2.0}, {3.0, 3.0}), whole,
                      KurtosisWeighting::kPower) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(
      band_kurtosis(make_spectrum({1.0, 2.0}, {4.0, 0.0}), whole, KurtosisWeighting::kPower),
      NumericError);
  CHECK_THROWS_AS(band_kurtosis(make_spectrum({1.0, 2.0}, {4.0, 1.0}), Band{0.9, 1.1},
                                KurtosisWeighting::kFrequency),
                  ValidationError);
}

TEST_CASE("pulse significance is the product of its factors") {
  std::vector<double> power(1000, 1.0);
  power[249] = 100.0;  // spike at 1.25 Hz
  const Spectrum sp = make_spectrum(freq_grid(5.0, 0.005), power);
  const Band band{0.75, 2.5};
  const double ps = pulse_significance(sp, band, KurtosisWeighting::kPower);
  CHECK(ps == doctest::Approx(nbp(sp, band) * band_kurtosis(sp, band, KurtosisWeighting::kPower))
                  .epsilon(1e-12));

  // Flat case in closed form: kurtosis of a discrete uniform distribution
  // on m equidistant points is (3/5)(3m^2-7)/(m^2-1).
  const Spectrum flat = make_spectrum(freq_grid(5.0, 0.005), std::vector<double>(1000, 1.0));
  const double m = 351.0;
  const double k_uniform = 0.6 * (3.0 * m * m - 7.0) / (m * m - 1.0);
  CHECK(band_kurtosis(flat, band, KurtosisWeighting::kPower) ==
        doctest::Approx(k_uniform).epsilon(1e-9));
  const double ps_flat = pulse_significance(flat, band, KurtosisWeighting::kPower);
  CHECK(ps_flat == doctest::Approx(0.351 * k_uniform).epsilon(1e-9));
  CHECK(ps > ps_flat);
}

TEST_CASE("bandpass design against frozen coefficients") {
  const auto sections = butter_bandpass_sections(62.0, Band{0.08, 0.5}, 3);
  REQUIRE(sections.size() == 3);

  const double expected[3][5] = {
      {9.2412909637845925e-06, 1.8482581927569185e-05, 9.2412909637845925e-06,
       -1.9621812120242252, 0.96446947880817346},
      {1.0, 0.0, -1.0, -1.9579149843503005, 0.95831727516178578},
      {1.0, -2.0, 1.0, -1.9935681175963893, 0.99364031605018754},
  };
  for (int i = 0; i < 3; ++i) {
    CAPTURE(i);
    const Biquad& q = sections[static_cast<std::size_t>(i)];
    CHECK(q.b0 == doctest::Approx(expected[i][0]).epsilon(1e-9));
    CHECK(q.b1 == doctest::Approx(expected[i][1]).epsilon(1e-9));
    CHECK(q.b2 == doctest::Approx(expected[i][2]).epsilon(1e-9));
    CHECK(q.a1 == doctest::Approx(expected[i][3]).epsilon(1e-9));
    CHECK(q.a2 == doctest::Approx(expected[i][4]).epsilon(1e-9));
  }

  CHECK_THROWS_AS(butter_bandpass_sections(62.0, Band{0.08, 31.0}, 3), ValidationError);
  CHECK_THROWS_AS(butter_bandpass_sections(62.0, Band{0.08, 0.5}, 0), ValidationError);
}

TEST_CASE("bandpass magnitude probes") {
  const auto sections = butter_bandpass_sections(62.0, Band{0.08, 0.5}, 3);
  const double probes[][2] = {
      {0.05, 0.17298007753790962},  {0.08, 0.70710678118612447},
      {0.1, 0.93954511410958874},   {0.17, 0.99999292521344429},
      {0.25, 0.99995171024751628},  {0.4, 0.9395858405707066},
      {0.45, 0.8439941639339702},   {0.5, 0.70710678118644599},
      {0.6, 0.43872538135884287},   {1.0, 0.083283044058739791},
  };
  for (const auto& probe : probes) {
    CAPTURE(probe[0]);
    CHECK(cascade_magnitude(sections, probe[0], 62.0) ==
          doctest::Approx(probe[1]).epsilon(1e-9));
  }
}

TEST_CASE("zero phase filtering has no lag") {
  const std::vector<double> t = testutil::uniform_times(62.0, 7440);
  std::vector<double> mix(t.size(), 0.0);
  const std::vector<double> ts(t.begin() + 2500, t.begin() + 4940);
  for (double freq : {0.1, 0.25, 0.45}) {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::sin(kTwoPi * freq * t[i]);
    const std::vector<double> filtered = butter_bandpass_zero_phase(x, 62.0, Band{0.08, 0.5});
    REQUIRE(filtered.size() == x.size());
    const std::vector<double> xs(x.begin() + 2500, x.begin() + 4940);
    const std::vector<double> fs(filtered.begin() + 2500, filtered.begin() + 4940);
    CAPTURE(freq);
    const double shift = testutil::wrap_angle(testutil::phase_at(fs, ts, freq) -
                                              testutil::phase_at(xs, ts, freq));
    // Under a tenth of a sample of group delay at every tone.
    CHECK(std::abs(shift) < 0.1 * kTwoPi * freq / 62.0);
    for (std::size_t i = 0; i < t.size(); ++i) mix[i] += x[i];
  }

  // Time reversal commutes with the filter.
  const std::vector<double> filtered = butter_bandpass_zero_phase(mix, 62.0, Band{0.08, 0.5});
  std::vector<double> rx(mix.rbegin(), mix.rend());
  std::vector<double> rf = butter_bandpass_zero_phase(rx, 62.0, Band{0.08, 0.5});
  std::reverse(rf.begin(), rf.end());
  for (std::size_t i = 0; i < mix.size(); i += 97)
    CHECK(rf[i] == doctest::Approx(filtered[i]).epsilon(1e-9));

  CHECK_THROWS_AS(butter_bandpass_zero_phase(std::vector<double>(18, 0.0), 62.0, Band{0.08, 0.5}),
                  ValidationError);
}

// The start-up transient of the recursive passes decays on the scale of the
// sharpest pole (|p| ~ 0.9968), which at 62 Hz is far longer than a 5%
// margin of a 60 s record. Kept to show the claim fails as stated.
TEST_CASE("passband containment in the interior 90 percent [documented failure]"
          * doctest::skip()) {
  const std::vector<double> t = testutil::uniform_times(62.0, 3720);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::sin(kTwoPi * 0.25 * t[i]);
  const std::vector<double> filtered = butter_bandpass_zero_phase(x, 62.0, Band{0.08, 0.5});
  double worst = 0.0;
  for (std::size_t i = 186; i < 3534; ++i) worst = std::max(worst, std::abs(filtered[i] - x[i]));
  CHECK(worst < 0.01);  // documented failure: transients reach far deeper
}

TEST_CASE("passband tone survives away from the edges") {
  const std::vector<double> t = testutil::uniform_times(62.0, 7440);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::sin(kTwoPi * 0.25 * t[i]);
  const std::vector<double> filtered = butter_bandpass_zero_phase(x, 62.0, Band{0.08, 0.5});
  double worst = 0.0;
  for (std::size_t i = 2500; i < 4940; ++i) worst = std::max(worst, std::abs(filtered[i] - x[i]));
  CHECK(worst < 0.01);
}

TEST_CASE("resampling onto a uniform clock") {
  const std::vector<double> t = testutil::uniform_times(62.0, 100);
  std::vector<double> x(t.size());
  testutil::Rng rng(20);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const auto [same, rate] = resample_uniform(x, t);
  CHECK(rate == doctest::Approx(62.0).epsilon(1e-9));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same[i] == x[i]);

  const std::vector<double> jt = make_timestamps(5.0, 62.0, 0.05, 31);
  std::vector<double> jx(jt.size());
  for (std::size_t i = 0; i < jt.size(); ++i) jx[i] = std::sin(kTwoPi * 0.3 * jt[i]);
  const auto [resampled, jrate] = resample_uniform(jx, jt);
  CHECK(resampled.front() == jx.front());
  CHECK(resampled.back() == jx.back());
  CHECK(jrate == doctest::Approx((static_cast<double>(jt.size()) - 1.0) /
                                 (jt.back() - jt.front()))
                     .epsilon(1e-12));
  // Linear interpolation of a smooth tone stays close to the tone itself.
  const double dt = (jt.back() - jt.front()) / (static_cast<double>(jt.size()) - 1.0);
  for (std::size_t i = 0; i < resampled.size(); ++i) {
    const double u = jt.front() + static_cast<double>(i) * dt;
    CHECK(resampled[i] == doctest::Approx(std::sin(kTwoPi * 0.3 * u)).epsilon(0.001));
  }

  CHECK_THROWS_AS(resample_uniform({1.0}, {0.0}), ValidationError);
  CHECK_THROWS_AS(resample_uniform(x, std::vector<double>(100, 0.5)), ValidationError);
}

}  // TEST_SUITE
