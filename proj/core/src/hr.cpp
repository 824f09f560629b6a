#include "neckvitals/hr.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include <cblas.h>
#include <lapacke.h>

#include "neckvitals/errors.hpp"
#include "neckvitals/imaging.hpp"
#include "neckvitals/smoothing.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace neckvitals {

namespace {

// Window-sized problems are too small for threaded BLAS to pay off, and a
// fixed thread count keeps runs reproducible across machines.
struct BlasSetup {
  BlasSetup() { openblas_set_num_threads(1); }
};
const BlasSetup blas_setup;

std::vector<double> project_score(const std::vector<double>& centered, int np, int nt,
                                  double* loading) {
  const std::size_t arg =
      static_cast<std::size_t>(std::max_element(loading, loading + np,
                                                [](double a, double b) {
                                                  return std::abs(a) < std::abs(b);
                                                }) -
                               loading);
  if (loading[arg] < 0.0) {
    for (int p = 0; p < np; ++p) loading[p] = -loading[p];
  }
  std::vector<double> score(static_cast<std::size_t>(nt));
  cblas_dgemv(CblasColMajor, CblasTrans, np, nt, 1.0, centered.data(), np, loading, 1, 0.0,
              score.data(), 1);
  return score;
}

}  // namespace

CarMontage car_montage(const ChannelMatrix& channels) {
  const int np = channels.np;
  const int nt = channels.nt;
  if (np < 3) {
    throw ValidationError("common average reference requires at least three channels");
  }
  CarMontage out;
  out.c0.resize(static_cast<std::size_t>(nt));
  out.residuals.np = np;
  out.residuals.nt = nt;
  out.residuals.timestamps = channels.timestamps;
  out.residuals.data.resize(channels.data.size());
  for (int t = 0; t < nt; ++t) {
    const double* col = channels.data.data() + static_cast<std::size_t>(t) * np;
    double* res = out.residuals.data.data() + static_cast<std::size_t>(t) * np;
    double sum = 0.0;
    for (int p = 0; p < np; ++p) sum += col[p];
    const double mean = sum / np;
    out.c0[t] = mean;
    for (int p = 0; p < np; ++p) res[p] = col[p] - mean;
  }
  return out;
}

PcaScores pca_components(const ChannelMatrix& residuals) {
  const int np = residuals.np;
  const int nt = residuals.nt;
  if (np < 3) {
    throw ValidationError("component analysis requires at least three channels");
  }
  if (nt < 2) {
    throw ValidationError("component analysis requires at least two samples");
  }

  std::vector<double> centered = residuals.data;
  {
    std::vector<double> mean(static_cast<std::size_t>(np), 0.0);
    for (int t = 0; t < nt; ++t) {
      const double* col = centered.data() + static_cast<std::size_t>(t) * np;
      for (int p = 0; p < np; ++p) mean[p] += col[p];
    }
    for (int p = 0; p < np; ++p) mean[p] /= nt;
    for (int t = 0; t < nt; ++t) {
      double* col = centered.data() + static_cast<std::size_t>(t) * np;
      for (int p = 0; p < np; ++p) col[p] -= mean[p];
    }
  }

  std::vector<double> cov(static_cast<std::size_t>(np) * np);
  cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, np, nt, 1.0 / (nt - 1), centered.data(),
              np, 0.0, cov.data(), np);

  std::vector<double> w(static_cast<std::size_t>(np));
  std::vector<double> z(static_cast<std::size_t>(np) * 3);
  std::vector<lapack_int> isuppz(6);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', np, cov.data(), np, 0.0, 0.0, np - 2, np, 0.0, &found,
      w.data(), z.data(), np, isuppz.data());
  if (info != 0 || found != 3) {
    throw NumericError("eigenvalue decomposition of the channel covariance failed");
  }
  // w is ascending: w[2] is the top eigenvalue, w[0] the third.
  if (!(w[2] > 0.0) || !(w[0] > w[2] * 1e-10)) {
    throw NumericError("channel covariance has rank below 3");
  }

  PcaScores out;
  out.c1 = project_score(centered, np, nt, z.data() + np);
  out.c2 = project_score(centered, np, nt, z.data());
  return out;
}

std::size_t select_component(const std::vector<ComponentCandidate>& candidates) {
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].usable || !std::isfinite(candidates[i].ps)) continue;
    if (best == candidates.size() || candidates[i].ps > candidates[best].ps) {
      best = i;
    }
  }
  if (best == candidates.size()) {
    throw NumericError("no component candidate has a usable pulse significance");
  }
  return best;
}

VitalTrace estimate_hr(const FrameSequence& seq, const TemplateImage& tmpl,
                       const PipelineConfig& cfg) {
  validate_config(cfg);
  validate_sequence(seq);
  if (seq.span() < cfg.window.duration) {
    throw ValidationError("sequence is shorter than one analysis window");
  }

  const MatchResult match =
      detect_neck(seq.frames.front(), tmpl, cfg.template_scales, cfg.amad_factor);
  const FrameSequence down = downsample_half(seq, match.rect);
  const Rect full_roi{0, 0, down.frames.front().height, down.frames.front().width};
  const ChannelMatrix channels = extract_channels(down, full_roi);
  const CarMontage car = car_montage(channels);

  const std::vector<double>& times = seq.timestamps;
  const std::vector<double> grid = freq_grid(nyquist_from_times(times), cfg.grid_step);

  TimeWindow wcfg = cfg.window;
  wcfg.start = times.front();
  const std::vector<TimeWindow> wins = windows(seq.span(), wcfg);

  const HmmConfig hmm{cfg.hr_band, cfg.grid_step, cfg.smoothing_lambda, cfg.hmm_bidirectional};
  ChainPotentials chain;
  VitalTrace trace;

  const int np = channels.np;
  for (const TimeWindow& win : wins) {
    const auto first = std::lower_bound(times.begin(), times.end(), win.start);
    const auto last = std::lower_bound(first, times.end(), win.start + win.duration);
    const std::size_t lo = static_cast<std::size_t>(first - times.begin());
    const std::size_t hi = static_cast<std::size_t>(last - times.begin());

    std::vector<double> wt(times.begin() + lo, times.begin() + hi);
    std::vector<double> c0w(car.c0.begin() + lo, car.c0.begin() + hi);
    ChannelMatrix resw;
    resw.np = np;
    resw.nt = static_cast<int>(hi - lo);
    resw.timestamps = wt;
    resw.data.assign(car.residuals.data.begin() + lo * np,
                     car.residuals.data.begin() + hi * np);
    PcaScores scores = pca_components(resw);

    std::vector<Spectrum> spectra = lomb_scargle_multi({&c0w, &scores.c1, &scores.c2}, wt, grid);
    std::vector<ComponentCandidate> cands(3);
    cands[0].label = "c0";
    cands[0].series = std::move(c0w);
    cands[1].label = "c1";
    cands[1].series = std::move(scores.c1);
    cands[2].label = "c2";
    cands[2].series = std::move(scores.c2);
    for (std::size_t i = 0; i < 3; ++i) {
      cands[i].spectrum = std::move(spectra[i]);
      try {
        cands[i].ps = pulse_significance(cands[i].spectrum, cfg.hr_band, cfg.kurtosis_weighting);
        cands[i].usable = true;
      } catch (const NumericError&) {
        cands[i].usable = false;
      }
    }
    const std::size_t sel = select_component(cands);
    append_window(chain, cands[sel].spectrum, hmm);
    trace.window_starts.push_back(win.start);
    trace.selected.push_back(cands[sel].label);
  }

  const std::vector<double> path = map_chain(chain, hmm);
  trace.rate_bpm.resize(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    trace.rate_bpm[i] = 60.0 * path[i];
  }
  return trace;
}

}  // namespace neckvitals
