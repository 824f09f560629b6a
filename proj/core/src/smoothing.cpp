#include "neckvitals/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "neckvitals/errors.hpp"

namespace neckvitals {

std::vector<double> data_term(const Spectrum& spec, const HmmConfig& cfg) {
  if (cfg.lambda < 0.0) throw ValidationError("lambda must be nonnegative");
  const auto [first, last] = band_bins(spec, cfg.band);
  double band_sum = 0.0;
  for (std::size_t i = first; i <= last; ++i) band_sum += spec.power[i];
  std::vector<double> phi(last - first + 1);
  if (band_sum <= 0.0) {
    std::fill(phi.begin(), phi.end(), 1.0);
    return phi;
  }
  for (std::size_t i = first; i <= last; ++i)
    phi[i - first] = std::exp(cfg.lambda * spec.power[i] / band_sum);
  return phi;
}

double smoothness(double f_i, double f_j) { return std::exp(-std::abs(f_i - f_j)); }

void append_window(ChainPotentials& chain, const Spectrum& spec, const HmmConfig& cfg) {
  const auto [first, last] = band_bins(spec, cfg.band);
  if (chain.freqs.empty()) {
    chain.freqs.assign(spec.freqs.begin() + static_cast<std::ptrdiff_t>(first),
                       spec.freqs.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  } else if (chain.freqs.size() != last - first + 1) {
    throw ValidationError("window spectra disagree on band bins");
  }
  chain.phi.push_back(data_term(spec, cfg));
}

namespace {

void validate_chain(const ChainPotentials& chain) {
  if (chain.phi.empty()) throw ValidationError("empty chain");
  const std::size_t s = chain.freqs.size();
  if (s == 0) throw ValidationError("chain has no states");
  for (const auto& phi : chain.phi) {
    if (phi.size() != s) throw ValidationError("potential length mismatch");
    for (double v : phi)
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("potentials must be positive finite");
  }
}

// One message hop: out(s) = max_s' prev(s') * phi_from(s') * psi(|s - s'|),
// renormalized to max 1.
void hop(const std::vector<double>& prev, const std::vector<double>& phi_from,
         const std::vector<double>& psi_by_offset, std::vector<double>& out) {
  const std::size_t s = prev.size();
  std::vector<double> weighted(s);
  for (std::size_t i = 0; i < s; ++i) weighted[i] = prev[i] * phi_from[i];
  double best_all = 0.0;
  for (std::size_t to = 0; to < s; ++to) {
    double best = 0.0;
    for (std::size_t from = 0; from < s; ++from) {
      const std::size_t d = to > from ? to - from : from - to;
      best = std::max(best, weighted[from] * psi_by_offset[d]);
    }
    out[to] = best;
    best_all = std::max(best_all, best);
  }
  if (best_all > 0.0)
    for (double& v : out) v /= best_all;
}

}  // namespace

std::vector<double> map_chain(const ChainPotentials& chain, const HmmConfig& cfg) {
  validate_chain(chain);
  const std::size_t n = chain.phi.size();
  const std::size_t s = chain.freqs.size();

  const double step = s >= 2 ? chain.freqs[1] - chain.freqs[0] : 0.0;
  std::vector<double> psi_by_offset(s);
  for (std::size_t d = 0; d < s; ++d) psi_by_offset[d] = std::exp(-(static_cast<double>(d) * step));

  std::vector<std::vector<double>> fwd(n, std::vector<double>(s, 1.0));
  for (std::size_t i = 1; i < n; ++i) hop(fwd[i - 1], chain.phi[i - 1], psi_by_offset, fwd[i]);

  std::vector<std::vector<double>> bwd;
  if (cfg.bidirectional) {
    bwd.assign(n, std::vector<double>(s, 1.0));
    for (std::size_t i = n - 1; i-- > 0;) hop(bwd[i + 1], chain.phi[i + 1], psi_by_offset, bwd[i]);
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < s; ++k) {
      double m = chain.phi[i][k] * fwd[i][k];
      if (cfg.bidirectional) m *= bwd[i][k];
      if (m > best) {
        best = m;
        arg = k;
      }
    }
    out[i] = chain.freqs[arg];
  }
  return out;
}

}  // namespace neckvitals
