#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "neckvitals/errors.hpp"
#include "neckvitals/frame.hpp"
#include "neckvitals/stats.hpp"

using namespace neckvitals;

TEST_SUITE("evaluation") {

TEST_CASE("incomplete beta closed forms") {
  for (double x : {0.1, 0.3, 0.5, 0.77, 0.95})
    CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));

  // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x)); at x = 1/4 that is exactly 1/3.
  CHECK(regularized_incomplete_beta(0.5, 0.5, 0.25) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  // Integer shapes reduce to a binomial tail: I_0.7(2,3) = 0.9163.
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.7) == doctest::Approx(0.9163).epsilon(1e-10));

  CHECK(regularized_incomplete_beta(2.0, 5.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 5.0, 1.0) == 1.0);

  testutil::Rng rng(55);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(0.2, 8.0);
    const double b = rng.uniform(0.2, 8.0);
    const double x = rng.uniform(0.0, 1.0);
    CHECK(regularized_incomplete_beta(a, b, x) +
              regularized_incomplete_beta(b, a, 1.0 - x) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("two-sided t probabilities") {
  CHECK(student_t_two_sided_p(-1.572, 371.0) ==
        doctest::Approx(0.1168029530062313).epsilon(1e-9));
  CHECK(student_t_two_sided_p(1.572, 371.0) == student_t_two_sided_p(-1.572, 371.0));
  CHECK(student_t_two_sided_p(0.0, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(student_t_two_sided_p(50.0, 5.0) < 1e-6);
  CHECK(student_t_two_sided_p(std::numeric_limits<double>::infinity(), 5.0) == 0.0);
  CHECK_THROWS_AS(student_t_two_sided_p(1.0, 0.0), ValidationError);

  // Correlation r = 0.59 over 24 pairs: t = r sqrt(df / (1 - r^2)), df = 22.
  const double r = 0.59;
  const double t = r * std::sqrt(22.0 / (1.0 - r * r));
  CHECK(t == doctest::Approx(3.4274636812654364).epsilon(1e-12));
  const double p = student_t_two_sided_p(t, 22.0);
  CHECK(p == doctest::Approx(0.0024080675107551936).epsilon(1e-9));
  CHECK(std::abs(p - 0.003) < 0.001);
}

TEST_CASE("paired t-test against frozen values") {
  const std::vector<double> a{3.1, 2.7, 4.0, 3.3, 2.9, 3.8, 3.5, 2.6};
  const std::vector<double> b{2.8, 2.9, 3.1, 3.0, 2.5, 3.9, 3.0, 2.4};
  const TTestResult res = paired_t_test(a, b);
  CHECK(res.df == 7);
  CHECK(res.t == doctest::Approx(2.3633067305929134).epsilon(1e-9));
  CHECK(res.p == doctest::Approx(0.05009699692948003).epsilon(1e-9));

  CHECK_THROWS_AS(paired_t_test(a, a), NumericError);
  CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(paired_t_test({1.0}, {2.0}), ValidationError);
}

TEST_CASE("point-biserial correlation against frozen values") {
  const std::vector<int> flag{1, 0, 1, 1, 0, 0, 1, 0, 1, 0};
  const std::vector<double> vals{5.2, 3.1, 4.8, 5.5, 2.9, 3.4, 4.1, 3.0, 5.9, 3.3};
  const CorrelationResult res = point_biserial(flag, vals);
  CHECK(res.r == doctest::Approx(0.90694099390581).epsilon(1e-9));
  CHECK(res.p == doctest::Approx(0.00029286627709039276).epsilon(1e-9));

  const CorrelationResult flat = point_biserial({0, 1, 0, 1}, {2.0, 2.0, 2.0, 2.0});
  CHECK(flat.r == 0.0);
  CHECK(flat.p == 1.0);

  CHECK_THROWS_AS(point_biserial({1, 1, 1, 1}, {1.0, 2.0, 3.0, 4.0}), ValidationError);
  CHECK_THROWS_AS(point_biserial({0, 1, 2, 1}, {1.0, 2.0, 3.0, 4.0}), ValidationError);
  CHECK_THROWS_AS(point_biserial({0, 1}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("agreement report by hand") {
  VitalTrace est;
  est.window_starts = {0.0, 1.0};
  est.rate_bpm = {71.0, 79.0};
  VitalTrace ref;
  ref.window_starts = {0.0, 1.0};
  ref.rate_bpm = {70.0, 80.0};

  const AgreementReport rep = agreement(est, ref);
  CHECK(rep.n_pairs == 2);
  CHECK(rep.mae_bpm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.mean_error_bpm == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.sd_error_bpm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.rmse_bpm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.pearson_r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.ba_bias == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.ba_hi == doctest::Approx(2.7718585822512662).epsilon(1e-9));
  CHECK(rep.ba_lo == doctest::Approx(-2.7718585822512662).epsilon(1e-9));
  CHECK(std::abs(rep.ba_hi - 2.771) < 1e-3);

  VitalTrace flat = ref;
  flat.rate_bpm = {70.0, 70.0};
  CHECK(std::isnan(agreement(est, flat).pearson_r));

  VitalTrace shifted = ref;
  shifted.window_starts = {0.0, 1.5};
  CHECK_THROWS_AS(agreement(est, shifted), ValidationError);
  VitalTrace lone;
  lone.window_starts = {0.0};
  lone.rate_bpm = {70.0};
  CHECK_THROWS_AS(agreement(lone, lone), ValidationError);
}

TEST_CASE("report text is stable") {
  VitalTrace est;
  est.window_starts = {0.0, 1.0};
  est.rate_bpm = {71.0, 79.0};
  VitalTrace ref;
  ref.window_starts = {0.0, 1.0};
  ref.rate_bpm = {70.0, 80.0};
  const std::string text = format_report(agreement(est, ref));
  CHECK(text ==
        "n_pairs=2\n"
        "mae_bpm=1.000000\n"
        "mean_error_bpm=0.000000\n"
        "sd_error_bpm=1.414214\n"
        "rmse_bpm=1.000000\n"
        "pearson_r=1.000000\n"
        "ba_bias_bpm=0.000000\n"
        "ba_lo_bpm=-2.771859\n"
        "ba_hi_bpm=2.771859\n");
}

TEST_CASE("reference rates from a clean recording") {
  ReferenceRecording rec;
  rec.kind = ReferenceRecording::Kind::BVP;
  rec.sample_rate = 32.0;
  rec.start_time = 100.0;
  const std::size_t n = 32 * 62;
  rec.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rec.start_time + static_cast<double>(i) / rec.sample_rate;
    rec.samples[i] = std::sin(2.0 * std::numbers::pi * 1.2 * t);
  }

  const std::vector<TimeWindow> wins = windows(61.0, TimeWindow{100.0, 30.0, 1.0});
  REQUIRE(wins.size() == 32);
  const VitalTrace trace = reference_rate(rec, Band{0.75, 2.5}, wins);
  REQUIRE(trace.rate_bpm.size() == wins.size());
  for (std::size_t i = 0; i < trace.rate_bpm.size(); ++i) {
    CAPTURE(i);
    CHECK(trace.rate_bpm[i] == doctest::Approx(72.0).epsilon(1e-9));
  }

  CHECK_THROWS_AS(reference_rate(rec, Band{0.75, 2.5}, {TimeWindow{90.0, 30.0, 1.0}}),
                  ValidationError);
  ReferenceRecording slow = rec;
  slow.sample_rate = 1.0;
  CHECK_THROWS_AS(reference_rate(slow, Band{0.75, 2.5}, wins), ValidationError);
}

}  // TEST_SUITE
