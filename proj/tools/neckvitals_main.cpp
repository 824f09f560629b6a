#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neckvitals/br.hpp"
#include "neckvitals/config.hpp"
#include "neckvitals/errors.hpp"
#include "neckvitals/hr.hpp"
#include "neckvitals/io.hpp"
#include "neckvitals/roi.hpp"
#include "neckvitals/scene.hpp"
#include "neckvitals/stats.hpp"

namespace {

namespace fs = std::filesystem;
using namespace neckvitals;

constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitUsage = 64;

struct PipelineFlags {
  double window = 30.0;
  double increment = 1.0;
  std::optional<double> band_lo;
  std::optional<double> band_hi;
  double lambda = 16.0;
  double grid_step = 0.005;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--window", flags.window, "Analysis window duration, seconds");
  cmd->add_option("--increment", flags.increment, "Window increment, seconds");
  cmd->add_option("--band-lo", flags.band_lo, "Search band lower edge, Hz");
  cmd->add_option("--band-hi", flags.band_hi, "Search band upper edge, Hz");
  cmd->add_option("--lambda", flags.lambda, "Smoothing data-term sharpness");
  cmd->add_option("--grid-step", flags.grid_step, "Frequency grid step, Hz");
}

PipelineConfig make_config(const PipelineFlags& flags, bool breathing) {
  PipelineConfig cfg;
  cfg.window.duration = flags.window;
  cfg.window.increment = flags.increment;
  cfg.smoothing_lambda = flags.lambda;
  cfg.grid_step = flags.grid_step;
  Band& band = breathing ? cfg.br_band : cfg.hr_band;
  if (flags.band_lo) band.lo = *flags.band_lo;
  if (flags.band_hi) band.hi = *flags.band_hi;
  return cfg;
}

TemplateImage load_template(const std::string& path) {
  TemplateImage tmpl;
  tmpl.image = load_pgm(path);
  tmpl.provenance = path;
  return tmpl;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

struct ConditionTable {
  std::vector<std::string> labels;        // per window, aligned with the estimate
  std::vector<std::string> distinct;      // in order of first appearance
};

ConditionTable load_conditions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "window_start_s,condition") {
    throw IoError("condition file must start with 'window_start_s,condition'");
  }
  ConditionTable table;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("bad condition row '" + line + "'");
    const std::string label = line.substr(comma + 1);
    if (label.empty()) throw IoError("empty condition label");
    table.labels.push_back(label);
    if (std::find(table.distinct.begin(), table.distinct.end(), label) ==
        table.distinct.end()) {
      table.distinct.push_back(label);
    }
  }
  return table;
}

VitalTrace subset(const VitalTrace& trace, const std::vector<std::size_t>& idx) {
  VitalTrace out;
  for (std::size_t i : idx) {
    out.window_starts.push_back(trace.window_starts[i]);
    out.rate_bpm.push_back(trace.rate_bpm[i]);
  }
  return out;
}

int cmd_simulate(const std::string& scene_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed) {
  SceneSpec spec = scene_path.empty() ? SceneSpec{} : load_scene_file(scene_path);
  if (seed) spec.seed = *seed;
  const SimulationResult result = run_scene(spec);
  try {
    fs::create_directories(out_dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(std::string("cannot create output directory: ") + e.what());
  }
  save_sequence(result.sequence, out_dir);
  save_ground_truth(result.truth, fs::path(out_dir) / "truth.csv");
  std::cout << "frames=" << result.sequence.size() << " span_s=" << result.sequence.span()
            << " windows=" << result.truth.window_starts.size() << '\n';
  return 0;
}

int cmd_detect_roi(const std::string& container, const std::string& template_path,
                   const std::string& out_path) {
  const FrameSequence seq = load_sequence(container);
  const TemplateImage tmpl = load_template(template_path);
  const MatchResult match = detect_neck(seq.frames.front(), tmpl);
  std::ostringstream text;
  text << "top=" << match.rect.top << '\n'
       << "left=" << match.rect.left << '\n'
       << "height=" << match.rect.height << '\n'
       << "width=" << match.rect.width << '\n'
       << "scale=" << match.scale << '\n'
       << "score=" << match.score << '\n';
  std::cout << text.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    out << text.str();
    if (!out) throw IoError("write failure on " + out_path);
  }
  return 0;
}

int cmd_rate(const std::string& container, const std::string& template_path,
             const std::string& out_path, const PipelineFlags& flags, bool breathing) {
  const FrameSequence seq = load_sequence(container);
  const TemplateImage tmpl = load_template(template_path);
  const PipelineConfig cfg = make_config(flags, breathing);
  const VitalTrace trace =
      breathing ? estimate_br(seq, tmpl, cfg) : estimate_hr(seq, tmpl, cfg);
  if (!out_path.empty()) save_vital_trace(trace, out_path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", mean_of(trace.rate_bpm));
  std::cout << "windows=" << trace.rate_bpm.size() << " mean_bpm=" << buf << '\n';
  return 0;
}

int cmd_evaluate(const std::string& est_path, const std::string& ref_path,
                 const std::string& out_path, const std::string& split_path,
                 const std::string& field, const PipelineFlags& flags) {
  const VitalTrace est = load_vital_trace(est_path);

  VitalTrace ref;
  const std::string header = first_line(ref_path);
  if (header == "t,value") {
    const bool breathing = field == "br";
    const ReferenceRecording rec = load_reference(
        ref_path, breathing ? ReferenceRecording::Kind::BW : ReferenceRecording::Kind::BVP);
    Band band = breathing ? Band{0.08, 0.5} : Band{0.75, 2.5};
    if (flags.band_lo) band.lo = *flags.band_lo;
    if (flags.band_hi) band.hi = *flags.band_hi;
    std::vector<TimeWindow> wins;
    for (double start : est.window_starts) {
      wins.push_back(TimeWindow{start, flags.window, flags.increment});
    }
    ref = reference_rate(rec, band, wins, flags.grid_step);
  } else if (header == "window_start_s,hr_bpm,br_bpm") {
    const GroundTruthTrace truth = load_ground_truth(ref_path);
    ref.window_starts = truth.window_starts;
    ref.rate_bpm = field == "br" ? truth.br_bpm : truth.hr_bpm;
  } else {
    ref = load_vital_trace(ref_path);
  }

  const AgreementReport overall = agreement(est, ref);
  std::ostringstream report;
  report << format_report(overall);

  if (!split_path.empty()) {
    const ConditionTable table = load_conditions(split_path);
    if (table.labels.size() != est.window_starts.size()) {
      throw ValidationError("condition file row count does not match the estimate");
    }
    if (table.distinct.size() != 2) {
      throw ValidationError("condition split requires exactly two distinct labels");
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
      groups[table.labels[i]].push_back(i);
    }
    std::vector<std::vector<double>> abs_errors;
    for (const std::string& label : table.distinct) {
      const auto& idx = groups[label];
      const AgreementReport part = agreement(subset(est, idx), subset(ref, idx));
      std::istringstream lines(format_report(part));
      std::string line;
      while (std::getline(lines, line)) {
        report << "condition_" << label << '.' << line << '\n';
      }
      std::vector<double> errs;
      for (std::size_t i : idx) errs.push_back(std::abs(est.rate_bpm[i] - ref.rate_bpm[i]));
      abs_errors.push_back(std::move(errs));
    }
    if (abs_errors[0].size() != abs_errors[1].size()) {
      throw ValidationError("condition split requires equal window counts per condition");
    }
    const TTestResult tt = paired_t_test(abs_errors[0], abs_errors[1]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "ttest_t=%.6f\nttest_p=%.6f\nttest_df=%zu\n", tt.t, tt.p,
                  tt.df);
    report << buf;
  }

  std::cout << report.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    out << report.str();
    if (!out) throw IoError("write failure on " + out_path);

    const std::string pairs_path = out_path + ".pairs.csv";
    std::ofstream pairs(pairs_path, std::ios::binary);
    if (!pairs) throw IoError("cannot write " + pairs_path);
    pairs << "window_start_s,est_bpm,ref_bpm,mean_bpm,diff_bpm\n";
    for (std::size_t i = 0; i < est.rate_bpm.size(); ++i) {
      char row[160];
      std::snprintf(row, sizeof row, "%.6f,%.6f,%.6f,%.6f,%.6f\n", est.window_starts[i],
                    est.rate_bpm[i], ref.rate_bpm[i],
                    0.5 * (est.rate_bpm[i] + ref.rate_bpm[i]),
                    est.rate_bpm[i] - ref.rate_bpm[i]);
      pairs << row;
    }
    if (!pairs) throw IoError("write failure on " + pairs_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heart and breathing rate estimation from near-infrared neck video"};
  app.require_subcommand(1);

  std::string scene_path, container, template_path, out_path, est_path, ref_path, split_path;
  std::string field = "hr";
  std::optional<std::uint64_t> seed;
  PipelineFlags hr_flags, br_flags, eval_flags;

  CLI::App* sim = app.add_subcommand("simulate", "Render a synthetic neck sequence");
  sim->add_option("--scene", scene_path, "Scene description file (key=value)");
  sim->add_option("--out", out_path, "Output container directory")->required();
  sim->add_option("--seed", seed, "Override the scene seed");

  CLI::App* roi = app.add_subcommand("detect-roi", "Locate the neck in the first frame");
  roi->add_option("--container", container, "Sequence container directory")->required();
  roi->add_option("--template", template_path, "Neck template (PGM)")->required();
  roi->add_option("--out", out_path, "Optional output text file");

  CLI::App* hr = app.add_subcommand("hr", "Estimate heart rate per window");
  hr->add_option("--container", container, "Sequence container directory")->required();
  hr->add_option("--template", template_path, "Neck template (PGM)")->required();
  hr->add_option("--out", out_path, "Output CSV path");
  add_pipeline_flags(hr, hr_flags);

  CLI::App* br = app.add_subcommand("br", "Estimate breathing rate per window");
  br->add_option("--container", container, "Sequence container directory")->required();
  br->add_option("--template", template_path, "Neck template (PGM)")->required();
  br->add_option("--out", out_path, "Output CSV path");
  add_pipeline_flags(br, br_flags);

  CLI::App* ev = app.add_subcommand("evaluate", "Compare an estimate against a reference");
  ev->add_option("--est", est_path, "Estimated trace CSV")->required();
  ev->add_option("--ref", ref_path,
                 "Reference: trace CSV, truth CSV, or recording CSV (t,value)")
      ->required();
  ev->add_option("--out", out_path, "Report path (pairs CSV written alongside)");
  ev->add_option("--split", split_path, "Per-window condition CSV for a two-group comparison");
  ev->add_option("--field", field, "Truth column when --ref is a truth CSV: hr or br")
      ->check(CLI::IsMember({"hr", "br"}));
  add_pipeline_flags(ev, eval_flags);

  CLI::App* dump = app.add_subcommand("config-dump", "Print the defaults table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(scene_path, out_path, seed);
    if (roi->parsed()) return cmd_detect_roi(container, template_path, out_path);
    if (hr->parsed()) return cmd_rate(container, template_path, out_path, hr_flags, false);
    if (br->parsed()) return cmd_rate(container, template_path, out_path, br_flags, true);
    if (ev->parsed()) {
      return cmd_evaluate(est_path, ref_path, out_path, split_path, field, eval_flags);
    }
    if (dump->parsed()) {
      std::cout << config_dump(PipelineConfig{});
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
