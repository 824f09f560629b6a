#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "neckvitals/errors.hpp"
#include "neckvitals/spectral.hpp"

namespace neckvitals {
namespace {

using cd = std::complex<double>;

struct PolePair {
  cd a;  // either a conjugate pair (a, conj(a)) or two reals (a, b)
  cd b;
  double worst;  // max |pole| in the pair
};

// Denominator (1, a1, a2) from a pole pair.
void pair_coeffs(const PolePair& p, double& a1, double& a2) {
  if (std::abs(p.a.imag()) > 1e-12) {
    a1 = -2.0 * p.a.real();
    a2 = std::norm(p.a);
  } else {
    a1 = -(p.a.real() + p.b.real());
    a2 = p.a.real() * p.b.real();
  }
}

cd eval_quad(double c2, double c1, double c0, cd z) { return (c2 * z + c1) * z + c0; }

}  // namespace

std::vector<Biquad> butter_bandpass_sections(double rate, const Band& band, int order) {
  validate_band(band);
  if (order < 1) throw ValidationError("filter order must be >= 1");
  if (!(rate > 2.0 * band.hi)) throw ValidationError("band reaches or exceeds the Nyquist rate");

  const double k = 2.0 * rate;  // bilinear constant
  const double w1 = k * std::tan(std::numbers::pi * band.lo / rate);
  const double w2 = k * std::tan(std::numbers::pi * band.hi / rate);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  // Low-pass prototype poles on the unit circle, left half-plane.
  std::vector<cd> zpoles;
  zpoles.reserve(2 * static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const double ang = std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order);
    const cd p{std::cos(ang), std::sin(ang)};
    // Band-pass transform: each prototype pole yields two analog poles.
    const cd pb = p * bw;
    const cd disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
    for (const cd s : {0.5 * (pb + disc), 0.5 * (pb - disc)})
      zpoles.push_back((k + s) / (k - s));  // bilinear map to the z-plane
  }

  // Group digital poles into conjugate or real pairs.
  constexpr double kImTol = 1e-9;
  std::vector<cd> upper, reals;
  for (const cd z : zpoles) {
    if (z.imag() > kImTol)
      upper.push_back(z);
    else if (std::abs(z.imag()) <= kImTol)
      reals.push_back(z);
  }
  std::sort(reals.begin(), reals.end(), [](cd a, cd b) { return a.real() > b.real(); });
  if ((reals.size() % 2) != 0) throw NumericError("pole set lost conjugate symmetry");

  std::vector<PolePair> pairs;
  for (const cd z : upper) pairs.push_back({z, std::conj(z), std::abs(z)});
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
    pairs.push_back({reals[i], reals[i + 1], std::max(std::abs(reals[i]), std::abs(reals[i + 1]))});
  if (pairs.size() != static_cast<std::size_t>(order))
    throw NumericError("unexpected pole pairing");

  // Assign the 2N zeros (N at z=+1, N at z=-1): pairs nearest the unit
  // circle choose first, taking the closer zero while stock remains.
  std::sort(pairs.begin(), pairs.end(),
            [](const PolePair& x, const PolePair& y) { return x.worst > y.worst; });
  int pos_left = order, neg_left = order;
  struct Zeros {
    int pos;
    int neg;
  };
  std::vector<Zeros> zs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double dpos = std::abs(pairs[i].a - cd{1.0, 0.0});
    const double dneg = std::abs(pairs[i].a + cd{1.0, 0.0});
    int want_pos = dpos <= dneg ? 2 : 0;
    want_pos = std::clamp(want_pos, 2 - neg_left, pos_left);
    zs[i] = {want_pos, 2 - want_pos};
    pos_left -= zs[i].pos;
    neg_left -= zs[i].neg;
  }

  // Cascade with the least selective section first.
  std::vector<std::size_t> idx(pairs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = pairs.size() - 1 - i;

  std::vector<Biquad> sections;
  sections.reserve(pairs.size());
  for (std::size_t i : idx) {
    Biquad q{};
    pair_coeffs(pairs[i], q.a1, q.a2);
    if (zs[i].pos == 2) {
      q.b0 = 1.0; q.b1 = -2.0; q.b2 = 1.0;
    } else if (zs[i].neg == 2) {
      q.b0 = 1.0; q.b1 = 2.0; q.b2 = 1.0;
    } else {
      q.b0 = 1.0; q.b1 = 0.0; q.b2 = -1.0;
    }
    sections.push_back(q);
  }

  // Unit gain at the digital image of the analog center frequency.
  const double theta_c = 2.0 * std::atan(w0 / k);
  const cd zc{std::cos(theta_c), std::sin(theta_c)};
  cd h{1.0, 0.0};
  for (const Biquad& q : sections)
    h *= eval_quad(q.b0, q.b1, q.b2, zc) / eval_quad(1.0, q.a1, q.a2, zc);
  const double g = 1.0 / std::abs(h);
  if (!std::isfinite(g)) throw NumericError("gain normalization failed");
  sections.front().b0 *= g;
  sections.front().b1 *= g;
  sections.front().b2 *= g;
  return sections;
}

double cascade_magnitude(const std::vector<Biquad>& sections, double freq, double rate) {
  const double theta = 2.0 * std::numbers::pi * freq / rate;
  const cd z{std::cos(theta), std::sin(theta)};
  cd h{1.0, 0.0};
  for (const Biquad& q : sections)
    h *= eval_quad(q.b0, q.b1, q.b2, z) / eval_quad(1.0, q.a1, q.a2, z);
  return std::abs(h);
}

namespace {

// One cascade pass, direct form II transposed; each section starts from
// its constant-input steady state scaled by the first sample it sees.
void cascade_pass(const std::vector<Biquad>& sections, std::vector<double>& v) {
  for (const Biquad& q : sections) {
    const double denom = 1.0 + q.a1 + q.a2;
    const double y_ss = (q.b0 + q.b1 + q.b2) / denom;
    double s0 = (y_ss - q.b0) * v.front();
    double s1 = (q.b2 - q.a2 * y_ss) * v.front();
    for (double& x : v) {
      const double y = q.b0 * x + s0;
      s0 = q.b1 * x - q.a1 * y + s1;
      s1 = q.b2 * x - q.a2 * y;
      x = y;
    }
  }
}

std::vector<double> forward_backward(const std::vector<Biquad>& sections, std::vector<double> v) {
  cascade_pass(sections, v);
  std::reverse(v.begin(), v.end());
  cascade_pass(sections, v);
  std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<double> butter_bandpass_zero_phase(const std::vector<double>& values, double rate,
                                               const Band& band, int order) {
  const auto sections = butter_bandpass_sections(rate, band, order);
  const std::size_t n = values.size();
  const std::size_t pad = 3 * static_cast<std::size_t>(order);
  if (n <= 6 * static_cast<std::size_t>(order))
    throw ValidationError("series too short for zero-phase padding");

  // Odd reflection about both endpoint values.
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * values.front() - values[pad - i];
  std::copy(values.begin(), values.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * values.back() - values[n - 2 - i];

  // Averaging the two pass orderings makes time reversal exact: reversing
  // the input swaps the orderings, and the mean is order-insensitive.
  const std::vector<double> fb = forward_backward(sections, ext);
  std::reverse(ext.begin(), ext.end());
  std::vector<double> bf = forward_backward(sections, std::move(ext));
  std::reverse(bf.begin(), bf.end());

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (fb[pad + i] + bf[pad + i]);
  return out;
}

}  // namespace neckvitals
