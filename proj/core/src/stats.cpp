#include "neckvitals/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "neckvitals/errors.hpp"

namespace neckvitals {

namespace {

double continued_fraction(double a, double b, double x) {
  // Lentz's method for the incomplete-beta continued fraction.
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

double sample_mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("incomplete beta requires positive shape parameters");
  }
  if (!(x >= 0.0) || !(x <= 1.0)) {
    throw ValidationError("incomplete beta argument must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) {
    throw ValidationError("degrees of freedom must be positive");
  }
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

VitalTrace reference_rate(const ReferenceRecording& rec, const Band& band,
                          const std::vector<TimeWindow>& wins, double grid_step) {
  validate_band(band);
  if (!(rec.sample_rate > 0.0)) {
    throw ValidationError("reference recording must have a positive sample rate");
  }
  if (rec.samples.size() < 4) {
    throw ValidationError("reference recording is too short");
  }
  if (!(grid_step > 0.0)) {
    throw ValidationError("grid step must be positive");
  }
  const double nyquist = 0.5 * rec.sample_rate;
  const double tol = 1e-6 * grid_step;
  if (band.hi > nyquist + tol) {
    throw ValidationError("band exceeds the reference Nyquist frequency");
  }
  std::vector<double> grid;
  {
    const auto k_lo = static_cast<long>(std::ceil(band.lo / grid_step - 1e-6));
    const auto k_hi = static_cast<long>(std::floor(band.hi / grid_step + 1e-6));
    for (long k = std::max(1l, k_lo); k <= k_hi; ++k) {
      grid.push_back(static_cast<double>(k) * grid_step);
    }
  }
  if (grid.empty()) {
    throw ValidationError("band holds no grid frequencies");
  }

  const double start = rec.start_time;
  const double end = start + static_cast<double>(rec.samples.size() - 1) / rec.sample_rate;

  VitalTrace trace;
  for (const TimeWindow& win : wins) {
    if (win.start < start - 1e-9 || win.start + win.duration > end + 1.0 / rec.sample_rate + 1e-9) {
      throw ValidationError("window extends outside the reference recording");
    }
    const auto lo = static_cast<std::size_t>(
        std::max(0.0, std::ceil((win.start - start) * rec.sample_rate - 1e-9)));
    auto hi = static_cast<std::size_t>(
        std::ceil((win.start + win.duration - start) * rec.sample_rate - 1e-9));
    hi = std::min(hi, rec.samples.size());

    std::vector<double> values(rec.samples.begin() + lo, rec.samples.begin() + hi);
    std::vector<double> times(values.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      times[i] = start + static_cast<double>(lo + i) / rec.sample_rate;
    }
    const Spectrum spec = lomb_scargle(values, times, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < spec.power.size(); ++i) {
      if (spec.power[i] > spec.power[best]) best = i;
    }
    trace.window_starts.push_back(win.start);
    trace.rate_bpm.push_back(60.0 * spec.freqs[best]);
  }
  return trace;
}

AgreementReport agreement(const VitalTrace& est, const VitalTrace& ref) {
  const std::size_t n = est.window_starts.size();
  if (ref.window_starts.size() != n || est.rate_bpm.size() != n || ref.rate_bpm.size() != n) {
    throw ValidationError("traces must have the same number of windows");
  }
  if (n < 2) {
    throw ValidationError("agreement requires at least two pairs");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(est.window_starts[i] - ref.window_starts[i]) > 1e-9) {
      throw ValidationError("traces have misaligned window starts");
    }
  }

  AgreementReport rep;
  rep.n_pairs = n;
  double sum_d = 0.0, sum_abs = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = est.rate_bpm[i] - ref.rate_bpm[i];
    sum_d += d;
    sum_abs += std::abs(d);
    sum_sq += d * d;
  }
  const double nn = static_cast<double>(n);
  rep.mean_error_bpm = sum_d / nn;
  rep.mae_bpm = sum_abs / nn;
  rep.rmse_bpm = std::sqrt(sum_sq / nn);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = est.rate_bpm[i] - ref.rate_bpm[i] - rep.mean_error_bpm;
    ss += d * d;
  }
  rep.sd_error_bpm = std::sqrt(ss / (nn - 1.0));
  rep.ba_bias = rep.mean_error_bpm;
  rep.ba_lo = rep.ba_bias - 1.96 * rep.sd_error_bpm;
  rep.ba_hi = rep.ba_bias + 1.96 * rep.sd_error_bpm;

  const double mean_e = sample_mean(est.rate_bpm);
  const double mean_r = sample_mean(ref.rate_bpm);
  double see = 0.0, srr = 0.0, ser = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double de = est.rate_bpm[i] - mean_e;
    const double dr = ref.rate_bpm[i] - mean_r;
    see += de * de;
    srr += dr * dr;
    ser += de * dr;
  }
  rep.pearson_r = (see > 0.0 && srr > 0.0)
                      ? ser / std::sqrt(see * srr)
                      : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::string format_report(const AgreementReport& rep) {
  std::ostringstream out;
  auto put = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out << key << '=' << buf << '\n';
  };
  out << "n_pairs=" << rep.n_pairs << '\n';
  put("mae_bpm", rep.mae_bpm);
  put("mean_error_bpm", rep.mean_error_bpm);
  put("sd_error_bpm", rep.sd_error_bpm);
  put("rmse_bpm", rep.rmse_bpm);
  put("pearson_r", rep.pearson_r);
  put("ba_bias_bpm", rep.ba_bias);
  put("ba_lo_bpm", rep.ba_lo);
  put("ba_hi_bpm", rep.ba_hi);
  return out.str();
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) {
    throw ValidationError("paired samples must have equal length");
  }
  if (n < 2) {
    throw ValidationError("paired t-test requires at least two pairs");
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = sample_mean(d);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw NumericError("paired differences have zero variance");
  }
  TTestResult res;
  res.df = n - 1;
  res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  res.p = student_t_two_sided_p(res.t, static_cast<double>(res.df));
  return res;
}

CorrelationResult point_biserial(const std::vector<int>& binary,
                                 const std::vector<double>& values) {
  const std::size_t n = binary.size();
  if (values.size() != n) {
    throw ValidationError("indicator and values must have equal length");
  }
  if (n < 3) {
    throw ValidationError("point-biserial correlation requires at least three pairs");
  }
  std::size_t ones = 0;
  for (int b : binary) {
    if (b != 0 && b != 1) {
      throw ValidationError("indicator entries must be 0 or 1");
    }
    ones += static_cast<std::size_t>(b);
  }
  if (ones == 0 || ones == n) {
    throw ValidationError("both indicator classes must be present");
  }

  const double mean_b = static_cast<double>(ones) / static_cast<double>(n);
  const double mean_v = sample_mean(values);
  double sbb = 0.0, svv = 0.0, sbv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double db = static_cast<double>(binary[i]) - mean_b;
    const double dv = values[i] - mean_v;
    sbb += db * db;
    svv += dv * dv;
    sbv += db * dv;
  }
  CorrelationResult res;
  if (!(svv > 0.0)) {
    res.r = 0.0;
    res.p = 1.0;
    return res;
  }
  res.r = sbv / std::sqrt(sbb * svv);
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - res.r * res.r;
  if (denom <= 0.0) {
    res.p = 0.0;
    return res;
  }
  res.p = student_t_two_sided_p(res.r * std::sqrt(df / denom), df);
  return res;
}

}  // namespace neckvitals
