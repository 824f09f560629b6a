#pragma once

#include <vector>

#include "neckvitals/spectral.hpp"

namespace neckvitals {

/// Chain-model parameters for per-window frequency smoothing.
struct HmmConfig {
  Band band;
  double grid_step = 0.005;   // Hz
  double lambda = 16.0;       // data-term sharpness
  bool bidirectional = true;  // false: causal, forward messages only
};

/// Per-window unnormalized state potentials over the shared band grid.
struct ChainPotentials {
  std::vector<std::vector<double>> phi;  // [window][state], strictly positive
  std::vector<double> freqs;             // Hz per state
};

/// exp(lambda * p(f) / sum of band power) per band bin; uniform when the
/// band holds no power.
std::vector<double> data_term(const Spectrum& spec, const HmmConfig& cfg);

/// Neighbor affinity exp(-|f_i - f_j|), frequencies in Hz.
double smoothness(double f_i, double f_j);

/// Appends one window's data term (and fixes the state grid on first use).
void append_window(ChainPotentials& chain, const Spectrum& spec, const HmmConfig& cfg);

/// Max-product smoothing over the chain: per-window max-marginal argmax,
/// ties toward the lowest frequency. Messages renormalized to max 1.
std::vector<double> map_chain(const ChainPotentials& chain, const HmmConfig& cfg);

}  // namespace neckvitals
