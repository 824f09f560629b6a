#include "neckvitals/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neckvitals/errors.hpp"

namespace neckvitals {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phasor recurrences are re-seeded from libm this often to stop drift.
constexpr std::size_t kRefreshStride = 1024;

struct CenteredSeries {
  std::vector<double> xc;
  double sigma2 = 0.0;
  bool constant = false;
};

CenteredSeries center(const std::vector<double>& values) {
  CenteredSeries out;
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  out.xc.resize(n);
  double maxabs = 0.0;
  double maxval = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.xc[i] = values[i] - mean;
    maxabs = std::max(maxabs, std::abs(out.xc[i]));
    maxval = std::max(maxval, std::abs(values[i]));
  }
  if (maxabs <= 1e-12 * std::max(1.0, maxval)) {
    out.constant = true;
    return out;
  }
  double ss = 0.0;
  for (double v : out.xc) ss += v * v;
  out.sigma2 = ss / (static_cast<double>(n) - 1.0);
  return out;
}

void validate_uniform_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("frequency grid is empty");
  if (!(grid.front() > 0.0)) throw ValidationError("frequency grid must be positive");
  if (grid.size() == 1) return;
  const double step = grid[1] - grid[0];
  if (!(step > 0.0)) throw ValidationError("frequency grid must ascend");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-9 * step)
      throw ValidationError("frequency grid spacing is not uniform");
}

// Accumulates, for every grid bin k, the sums over samples of
//   x_s cos(w_k t), x_s sin(w_k t)  (per series s)  and
//   cos(2 w_k t), sin(2 w_k t)      (shared).
// Bins walk via phasor recurrences: four chains advance by the
// 4-bin step so their multiplies do not serialize.
template <int NS>
void accumulate_sums(const std::array<const double*, 3>& xs, const std::vector<double>& times,
                     double f0, double step, std::size_t nbins, std::vector<double>& acc) {
  constexpr std::size_t kLanes = 2 * NS + 2;  // per-bin: (Ch,Sh) per series + (C2,S2)
  const std::size_t n = times.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double t = times[j];
    const double base = kTwoPi * f0 * t;   // phase of bin 0
    const double theta = kTwoPi * step * t;  // phase step between bins
    double x[NS];
    for (int s = 0; s < NS; ++s) x[s] = xs[s][j];

    double c1[4], s1[4], c2[4], s2[4];
    auto seed = [&](std::size_t k) {
      for (int m = 0; m < 4; ++m) {
        const double a = base + static_cast<double>(k + m) * theta;
        c1[m] = std::cos(a);
        s1[m] = std::sin(a);
        c2[m] = std::cos(2.0 * a);
        s2[m] = std::sin(2.0 * a);
      }
    };
    const double adv1c = std::cos(4.0 * theta), adv1s = std::sin(4.0 * theta);
    const double adv2c = std::cos(8.0 * theta), adv2s = std::sin(8.0 * theta);

    std::size_t k = 0;
    seed(0);
    for (; k + 4 <= nbins; k += 4) {
      if (k != 0 && (k % kRefreshStride) == 0) seed(k);
      double* row = acc.data() + k * kLanes;
      for (int m = 0; m < 4; ++m) {
        double* bin = row + static_cast<std::size_t>(m) * kLanes;
        for (int s = 0; s < NS; ++s) {
          bin[2 * s] += x[s] * c1[m];
          bin[2 * s + 1] += x[s] * s1[m];
        }
        bin[2 * NS] += c2[m];
        bin[2 * NS + 1] += s2[m];
        const double nc1 = c1[m] * adv1c - s1[m] * adv1s;
        s1[m] = c1[m] * adv1s + s1[m] * adv1c;
        c1[m] = nc1;
        const double nc2 = c2[m] * adv2c - s2[m] * adv2s;
        s2[m] = c2[m] * adv2s + s2[m] * adv2c;
        c2[m] = nc2;
      }
    }
    for (; k < nbins; ++k) {
      const double a = base + static_cast<double>(k) * theta;
      const double ca = std::cos(a), sa = std::sin(a);
      double* bin = acc.data() + k * kLanes;
      for (int s = 0; s < NS; ++s) {
        bin[2 * s] += x[s] * ca;
        bin[2 * s + 1] += x[s] * sa;
      }
      bin[2 * NS] += std::cos(2.0 * a);
      bin[2 * NS + 1] += std::sin(2.0 * a);
    }
  }
}

}  // namespace

void validate_band(const Band& band) {
  if (!(band.lo > 0.0) || !(band.hi > band.lo)) throw ValidationError("band must satisfy 0 < lo < hi");
}

double nyquist_from_times(const std::vector<double>& times) {
  if (times.size() < 2) throw ValidationError("need at least 2 timestamps");
  std::vector<double> gaps(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    gaps[i - 1] = times[i] - times[i - 1];
    if (!(gaps[i - 1] > 0.0)) throw ValidationError("timestamps not strictly increasing");
  }
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size() / 2;
  const double median_gap =
      (gaps.size() % 2 == 1) ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
  return 0.5 / median_gap;
}

std::vector<double> freq_grid(double nyquist, double step) {
  if (!(nyquist > 0.0) || !(step > 0.0)) throw ValidationError("grid parameters must be positive");
  const auto nbins = static_cast<std::size_t>(std::floor(nyquist / step + 1e-9));
  if (nbins == 0) throw ValidationError("grid step exceeds the Nyquist frequency");
  std::vector<double> grid(nbins);
  for (std::size_t k = 0; k < nbins; ++k) grid[k] = static_cast<double>(k + 1) * step;
  return grid;
}

std::pair<std::size_t, std::size_t> band_bins(const Spectrum& spec, const Band& band) {
  validate_band(band);
  if (spec.freqs.empty()) throw ValidationError("empty spectrum");
  const double step = spec.freqs.size() >= 2 ? spec.step() : spec.freqs[0];
  const double tol = 1e-6 * step;
  if (band.hi > spec.freqs.back() + tol) throw ValidationError("band exceeds spectrum range");
  std::size_t first = spec.freqs.size();
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    if (spec.freqs[i] >= band.lo - tol && spec.freqs[i] <= band.hi + tol) {
      if (!any) first = i;
      last = i;
      any = true;
    }
  }
  if (!any) throw ValidationError("band contains no grid bins");
  return {first, last};
}

std::vector<Spectrum> lomb_scargle_multi(const std::vector<const std::vector<double>*>& series,
                                         const std::vector<double>& times,
                                         const std::vector<double>& grid) {
  if (series.empty() || series.size() > 3)
    throw ValidationError("lomb_scargle_multi supports 1 to 3 series");
  const std::size_t n = times.size();
  if (n < 4) throw ValidationError("need at least 4 samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1])) throw ValidationError("timestamps not strictly increasing");
  for (const auto* v : series)
    if (v->size() != n) throw ValidationError("series length does not match timestamps");
  validate_uniform_grid(grid);

  const int ns = static_cast<int>(series.size());
  std::vector<CenteredSeries> centered;
  centered.reserve(series.size());
  for (const auto* v : series) centered.push_back(center(*v));

  const std::size_t nbins = grid.size();
  const double f0 = grid.front();
  const double step = nbins >= 2 ? grid[1] - grid[0] : grid[0];
  const std::size_t lanes = 2 * static_cast<std::size_t>(ns) + 2;
  std::vector<double> acc(nbins * lanes, 0.0);

  std::array<const double*, 3> xs{nullptr, nullptr, nullptr};
  for (int s = 0; s < ns; ++s) xs[s] = centered[s].xc.data();
  switch (ns) {
    case 1: accumulate_sums<1>(xs, times, f0, step, nbins, acc); break;
    case 2: accumulate_sums<2>(xs, times, f0, step, nbins, acc); break;
    default: accumulate_sums<3>(xs, times, f0, step, nbins, acc); break;
  }

  std::vector<Spectrum> out(series.size());
  for (auto& sp : out) {
    sp.freqs = grid;
    sp.power.assign(nbins, 0.0);
    sp.nyquist = grid.back();
  }
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < nbins; ++k) {
    const double* bin = acc.data() + k * lanes;
    const double c2 = bin[2 * ns];
    const double s2 = bin[2 * ns + 1];
    const double h = std::hypot(c2, s2);
    const double cc = 0.5 * (nd + h);
    const double ss = 0.5 * (nd - h);
    const double wtau = 0.5 * std::atan2(s2, c2);
    const double co = std::cos(wtau);
    const double si = std::sin(wtau);
    const bool ss_ok = ss > 1e-9 * nd;
    for (int s = 0; s < ns; ++s) {
      if (centered[s].constant) continue;
      const double ch = bin[2 * s];
      const double sh = bin[2 * s + 1];
      const double ct = co * ch + si * sh;
      const double st = co * sh - si * ch;
      double p = ct * ct / cc;
      if (ss_ok) p += st * st / ss;
      out[s].power[k] = p / (2.0 * centered[s].sigma2);
    }
  }
  return out;
}

Spectrum lomb_scargle(const std::vector<double>& values, const std::vector<double>& times,
                      const std::vector<double>& grid) {
  return std::move(lomb_scargle_multi({&values}, times, grid).front());
}

double nbp(const Spectrum& spec, const Band& band) {
  const auto [first, last] = band_bins(spec, band);
  double total = 0.0;
  for (double p : spec.power) total += p;
  if (total == 0.0) return 0.0;
  double in_band = 0.0;
  for (std::size_t i = first; i <= last; ++i) in_band += spec.power[i];
  return in_band / total;
}

double band_kurtosis(const Spectrum& spec, const Band& band, KurtosisWeighting weighting) {
  const auto [first, last] = band_bins(spec, band);
  if (last - first + 1 < 2) throw ValidationError("band must contain at least 2 bins");

  double maxp = 0.0;
  for (std::size_t i = first; i <= last; ++i) maxp = std::max(maxp, std::abs(spec.power[i]));

  if (weighting == KurtosisWeighting::kFrequency) {
    // Moments of the power values, weighted by frequency.
    double pf = 0.0, fsum = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      pf += spec.power[i] * spec.freqs[i];
      fsum += spec.freqs[i];
    }
    const double mu = pf / fsum;
    double m2 = 0.0, m4 = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      const double d = spec.power[i] - mu;
      const double d2 = d * d;
      m2 += d2 * spec.freqs[i];
      m4 += d2 * d2 * spec.freqs[i];
    }
    if (std::sqrt(m2 / fsum) <= 1e-12 * std::max(maxp, 1e-300))
      throw NumericError("degenerate band power: second moment collapsed");
    return m4 * fsum / (m2 * m2);
  }

  // Textbook variant: frequency distribution with the power profile as weights.
  double psum = 0.0, fp = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    psum += spec.power[i];
    fp += spec.freqs[i] * spec.power[i];
  }
  if (psum <= 0.0) throw NumericError("degenerate band power: zero total");
  const double mu = fp / psum;
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double d = spec.freqs[i] - mu;
    const double d2 = d * d;
    m2 += d2 * spec.power[i];
    m4 += d2 * d2 * spec.power[i];
  }
  m2 /= psum;
  m4 /= psum;
  if (std::sqrt(m2) <= 1e-12 * std::max(spec.freqs[last], 1.0))
    throw NumericError("degenerate band power: second moment collapsed");
  return m4 / (m2 * m2);
}

double pulse_significance(const Spectrum& spec, const Band& band, KurtosisWeighting weighting) {
  return nbp(spec, band) * band_kurtosis(spec, band, weighting);
}

std::pair<std::vector<double>, double> resample_uniform(const std::vector<double>& values,
                                                        const std::vector<double>& times) {
  const std::size_t n = values.size();
  if (n < 2) throw ValidationError("need at least 2 samples to resample");
  if (times.size() != n) throw ValidationError("values and times differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("duplicate or decreasing timestamps");

  const double span = times.back() - times.front();
  const double rate = (static_cast<double>(n) - 1.0) / span;
  const double dt = span / (static_cast<double>(n) - 1.0);

  std::vector<double> out(n);
  out.front() = values.front();
  out.back() = values.back();
  std::size_t j = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double u = times.front() + static_cast<double>(i) * dt;
    while (j + 2 < n && times[j + 1] <= u) ++j;
    const double seg = times[j + 1] - times[j];
    double alpha = (u - times[j]) / seg;
    if (alpha < 1e-9)
      out[i] = values[j];
    else if (alpha > 1.0 - 1e-9)
      out[i] = values[j + 1];
    else
      out[i] = values[j] + alpha * (values[j + 1] - values[j]);
  }
  return {std::move(out), rate};
}

}  // namespace neckvitals
