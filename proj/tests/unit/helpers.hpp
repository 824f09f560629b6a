#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace testutil {

inline std::vector<double> uniform_times(double rate, std::size_t n, double t0 = 0.0) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + static_cast<double>(i) / rate;
  return t;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Phase of the component at `freq` (Hz), by projection onto the quadrature
/// pair over the given samples. Equal phases mean zero group delay.
inline double phase_at(const std::vector<double>& values, const std::vector<double>& times,
                       double freq) {
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = 2.0 * 3.141592653589793238 * freq * times[i];
    c += values[i] * std::cos(a);
    s += values[i] * std::sin(a);
  }
  return std::atan2(c, s);
}

/// Wraps an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
  while (a > 3.141592653589793238) a -= 2.0 * 3.141592653589793238;
  while (a <= -3.141592653589793238) a += 2.0 * 3.141592653589793238;
  return a;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

}  // namespace testutil
