#pragma once

#include <string>
#include <vector>

#include "neckvitals/frame.hpp"
#include "neckvitals/io.hpp"
#include "neckvitals/spectral.hpp"

namespace neckvitals {

/// Agreement between an estimated and a reference rate trace.
/// rmse² == me² + sd²·(n−1)/n up to rounding; loa = bias ± 1.96·sd.
struct AgreementReport {
  std::size_t n_pairs = 0;
  double mae_bpm = 0.0;
  double mean_error_bpm = 0.0;   // est − ref
  double sd_error_bpm = 0.0;     // sample (n−1)
  double rmse_bpm = 0.0;
  double pearson_r = 0.0;        // NaN when either trace is constant
  double ba_bias = 0.0;
  double ba_lo = 0.0;
  double ba_hi = 0.0;
};

/// Band-limited periodogram argmax per window, no smoothing; ties toward
/// the lowest frequency. The grid uses the same step as the estimators.
VitalTrace reference_rate(const ReferenceRecording& rec, const Band& band,
                          const std::vector<TimeWindow>& wins, double grid_step = 0.005);

/// Window starts must align within 1e-9 s; requires at least two pairs.
AgreementReport agreement(const VitalTrace& est, const VitalTrace& ref);

/// key=value lines, one statistic per line, fixed order.
std::string format_report(const AgreementReport& report);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
};

/// Two-sided paired t-test; throws NumericError when the differences have
/// zero variance.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
};

/// Point-biserial correlation between a 0/1 indicator and values, with the
/// two-sided p of t = r·sqrt((n−2)/(1−r²)) at n−2 degrees of freedom.
CorrelationResult point_biserial(const std::vector<int>& binary,
                                 const std::vector<double>& values);

/// Two-sided tail probability of Student's t at the given degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace neckvitals
