#pragma once

#include <array>
#include <utility>
#include <vector>

namespace neckvitals {

/// Frequency interval in Hz.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

void validate_band(const Band& band);

/// Power on an ascending uniform frequency grid.
struct Spectrum {
  std::vector<double> freqs;   // Hz, uniform spacing, all > 0
  std::vector<double> power;   // same length, >= 0
  double nyquist = 0.0;        // Hz of the source series

  double step() const { return freqs.size() >= 2 ? freqs[1] - freqs[0] : 0.0; }
};

/// Half the median sampling rate of the given timestamps.
double nyquist_from_times(const std::vector<double>& times);

/// Grid k*step for k = 1 .. floor(nyquist/step): covers (0, nyquist].
std::vector<double> freq_grid(double nyquist, double step = 0.005);

/// Index range [first, last] of grid bins inside the band (inclusive).
std::pair<std::size_t, std::size_t> band_bins(const Spectrum& spec, const Band& band);

/// Classical normalized Lomb-Scargle periodogram of an unevenly sampled
/// series, evaluated on a uniform frequency grid. Near-constant input
/// yields all-zero power. Grid must be uniformly spaced and positive.
Spectrum lomb_scargle(const std::vector<double>& values, const std::vector<double>& times,
                      const std::vector<double>& grid);

/// Same periodogram for several series sharing one set of timestamps;
/// the time-only trigonometric sums are computed once for all series.
std::vector<Spectrum> lomb_scargle_multi(const std::vector<const std::vector<double>*>& series,
                                         const std::vector<double>& times,
                                         const std::vector<double>& grid);

/// In-band power divided by full-grid power; 0 when the grid holds no power.
double nbp(const Spectrum& spec, const Band& band);

enum class KurtosisWeighting {
  kFrequency,  // moments of power values weighted by frequency
  kPower,      // textbook: moments of frequency weighted by power
};

/// Fourth standardized moment of the in-band power profile. Throws
/// NumericError when the second moment collapses (flat band power).
double band_kurtosis(const Spectrum& spec, const Band& band,
                     KurtosisWeighting weighting = KurtosisWeighting::kFrequency);

/// nbp * band_kurtosis; scale-invariant in the spectrum.
double pulse_significance(const Spectrum& spec, const Band& band,
                          KurtosisWeighting weighting = KurtosisWeighting::kFrequency);

/// Linear interpolation onto the uniform grid with rate (n-1)/(t_last-t_first);
/// endpoints preserved; already-uniform input passes through bitwise.
std::pair<std::vector<double>, double> resample_uniform(const std::vector<double>& values,
                                                        const std::vector<double>& times);

/// One second-order section, direct form II transposed.
struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (monic)
};

/// Digital Butterworth band-pass as a cascade of second-order sections
/// (bilinear transform with pre-warped cutoffs, unit gain at the warped
/// geometric center frequency).
std::vector<Biquad> butter_bandpass_sections(double rate, const Band& band, int order = 3);

/// Complex magnitude response of a section cascade at the given frequency.
double cascade_magnitude(const std::vector<Biquad>& sections, double freq, double rate);

/// Zero-phase band-pass: odd reflective padding of 3*order samples per
/// side, forward-backward runs in both orderings averaged so that
/// filter(reverse(x)) == reverse(filter(x)) exactly.
std::vector<double> butter_bandpass_zero_phase(const std::vector<double>& values, double rate,
                                               const Band& band, int order = 3);

}  // namespace neckvitals
