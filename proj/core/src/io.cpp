#include "neckvitals/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "neckvitals/errors.hpp"

namespace neckvitals {
namespace {

namespace fs = std::filesystem;

std::string format_seconds(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || errno == ERANGE || !std::isfinite(v))
    throw IoError("cannot parse " + what + ": '" + text + "'");
  while (end && *end == ' ') ++end;
  if (end && *end != '\0' && *end != '\r')
    throw IoError("trailing characters after " + what + ": '" + text + "'");
  return v;
}

long parse_long(const std::string& text, const std::string& what) {
  long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw IoError("cannot parse " + what + ": '" + text + "'");
  return v;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

void require_header(const std::vector<std::string>& lines, const std::string& header,
                    const fs::path& path) {
  if (lines.empty() || lines.front() != header)
    throw IoError("expected header '" + header + "' in " + path.string());
}

}  // namespace

void save_sequence(const FrameSequence& seq, const fs::path& dir) {
  validate_sequence(seq);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const int w = seq.frames.front().width;
  const int h = seq.frames.front().height;
  {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "manifest.txt").string());
    out << "width=" << w << "\n"
        << "height=" << h << "\n"
        << "frames=" << seq.size() << "\n"
        << "format=gray8\n";
    if (!out) throw IoError("write failure on manifest.txt");
  }
  {
    std::ofstream out(dir / "frames.bin", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "frames.bin").string());
    for (const Frame& f : seq.frames)
      out.write(reinterpret_cast<const char*>(f.pixels.data()),
                static_cast<std::streamsize>(f.pixels.size()));
    if (!out) throw IoError("write failure on frames.bin");
  }
  {
    std::ofstream out(dir / "timestamps.txt", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "timestamps.txt").string());
    for (double t : seq.timestamps) out << format_seconds(t) << "\n";
    if (!out) throw IoError("write failure on timestamps.txt");
  }
}

FrameSequence load_sequence(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.txt";
  if (!fs::exists(manifest_path)) throw IoError("missing manifest: " + manifest_path.string());

  std::map<std::string, std::string> kv;
  for (const std::string& line : read_lines(manifest_path)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed manifest line: '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"width", "height", "frames", "format"})
    if (!kv.count(key)) throw IoError(std::string("manifest missing key '") + key + "'");
  if (kv["format"] != "gray8") throw IoError("unsupported format '" + kv["format"] + "'");

  const long w = parse_long(kv["width"], "width");
  const long h = parse_long(kv["height"], "height");
  const long n = parse_long(kv["frames"], "frames");
  if (w <= 0 || h <= 0 || n <= 0) throw ValidationError("manifest dimensions must be positive");

  const fs::path frames_path = dir / "frames.bin";
  std::ifstream fin(frames_path, std::ios::binary | std::ios::ate);
  if (!fin) throw IoError("missing frame payload: " + frames_path.string());
  const auto actual = static_cast<unsigned long long>(fin.tellg());
  const auto expected = static_cast<unsigned long long>(w) * h * n;
  if (actual != expected)
    throw ValidationError("frames.bin size " + std::to_string(actual) +
                          " does not match manifest (expected " + std::to_string(expected) + ")");
  fin.seekg(0);

  FrameSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    Frame f;
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    f.pixels.resize(static_cast<std::size_t>(w) * h);
    fin.read(reinterpret_cast<char*>(f.pixels.data()),
             static_cast<std::streamsize>(f.pixels.size()));
    if (!fin) throw IoError("truncated read from frames.bin");
    seq.frames.push_back(std::move(f));
  }

  const fs::path ts_path = dir / "timestamps.txt";
  if (!fs::exists(ts_path)) throw IoError("missing timestamps: " + ts_path.string());
  for (const std::string& line : read_lines(ts_path)) {
    if (line.empty()) continue;
    seq.timestamps.push_back(parse_double(line, "timestamp"));
  }
  if (seq.timestamps.size() != static_cast<std::size_t>(n))
    throw ValidationError("timestamp count " + std::to_string(seq.timestamps.size()) +
                          " does not match frame count " + std::to_string(n));
  for (std::size_t i = 1; i < seq.timestamps.size(); ++i)
    if (!(seq.timestamps[i] > seq.timestamps[i - 1]))
      throw ValidationError("timestamps not strictly increasing");

  if (seq.timestamps.size() >= 2)
    seq.nominal_rate = (static_cast<double>(seq.timestamps.size()) - 1.0) / seq.span();
  return seq;
}

void save_vital_trace(const VitalTrace& trace, const fs::path& path) {
  if (trace.window_starts.size() != trace.rate_bpm.size())
    throw ValidationError("trace column lengths differ");
  const bool labeled = !trace.selected.empty();
  if (labeled && trace.selected.size() != trace.window_starts.size())
    throw ValidationError("trace label count differs");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (labeled ? "window_start_s,rate_bpm,selected\n" : "window_start_s,rate_bpm\n");
  for (std::size_t i = 0; i < trace.window_starts.size(); ++i) {
    out << format_seconds(trace.window_starts[i]) << "," << format_seconds(trace.rate_bpm[i]);
    if (labeled) out << "," << trace.selected[i];
    out << "\n";
  }
  if (!out) throw IoError("write failure on " + path.string());
}

VitalTrace load_vital_trace(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError("empty trace file " + path.string());
  bool labeled;
  if (lines.front() == "window_start_s,rate_bpm,selected")
    labeled = true;
  else if (lines.front() == "window_start_s,rate_bpm")
    labeled = false;
  else
    throw IoError("unrecognized trace header in " + path.string());
  VitalTrace t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_row(lines[i]);
    if (f.size() != (labeled ? 3u : 2u))
      throw IoError("bad trace row '" + lines[i] + "' in " + path.string());
    t.window_starts.push_back(parse_double(f[0], "window_start_s"));
    t.rate_bpm.push_back(parse_double(f[1], "rate_bpm"));
    if (labeled) t.selected.push_back(f[2]);
  }
  return t;
}

void save_ground_truth(const GroundTruthTrace& truth, const fs::path& path) {
  if (truth.window_starts.size() != truth.hr_bpm.size() ||
      truth.window_starts.size() != truth.br_bpm.size())
    throw ValidationError("ground-truth column lengths differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "window_start_s,hr_bpm,br_bpm\n";
  for (std::size_t i = 0; i < truth.window_starts.size(); ++i)
    out << format_seconds(truth.window_starts[i]) << "," << format_seconds(truth.hr_bpm[i]) << ","
        << format_seconds(truth.br_bpm[i]) << "\n";
  if (!out) throw IoError("write failure on " + path.string());
}

GroundTruthTrace load_ground_truth(const fs::path& path) {
  const auto lines = read_lines(path);
  require_header(lines, "window_start_s,hr_bpm,br_bpm", path);
  GroundTruthTrace t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_row(lines[i]);
    if (f.size() != 3) throw IoError("bad ground-truth row '" + lines[i] + "'");
    t.window_starts.push_back(parse_double(f[0], "window_start_s"));
    t.hr_bpm.push_back(parse_double(f[1], "hr_bpm"));
    t.br_bpm.push_back(parse_double(f[2], "br_bpm"));
  }
  return t;
}

ReferenceRecording load_reference(const fs::path& path, ReferenceRecording::Kind kind) {
  const auto lines = read_lines(path);
  require_header(lines, "t,value", path);
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_row(lines[i]);
    if (f.size() != 2) throw IoError("bad reference row '" + lines[i] + "'");
    times.push_back(parse_double(f[0], "t"));
    values.push_back(parse_double(f[1], "value"));
  }
  if (times.size() < 2) throw ValidationError("reference recording needs at least 2 samples");
  const double dt = (times.back() - times.front()) / (static_cast<double>(times.size()) - 1.0);
  if (!(dt > 0.0)) throw ValidationError("reference timestamps must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    if (std::abs(gap - dt) > 1e-6 * std::max(1.0, dt))
      throw ValidationError("reference recording is not uniformly sampled");
  }
  ReferenceRecording rec;
  rec.kind = kind;
  rec.sample_rate = 1.0 / dt;
  rec.start_time = times.front();
  rec.samples = std::move(values);
  return rec;
}

void save_reference(const ReferenceRecording& rec, const fs::path& path) {
  if (rec.sample_rate <= 0.0) throw ValidationError("reference sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "t,value\n";
  for (std::size_t i = 0; i < rec.samples.size(); ++i)
    out << format_seconds(rec.start_time + static_cast<double>(i) / rec.sample_rate) << ","
        << format_seconds(rec.samples[i]) << "\n";
  if (!out) throw IoError("write failure on " + path.string());
}


Frame load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto next_token = [&]() -> std::string {
    std::string tok;
    int c = in.get();
    while (c != std::char_traits<char>::eof()) {
      if (c == '#') {
        while (c != std::char_traits<char>::eof() && c != '\n') c = in.get();
      } else if (std::isspace(c)) {
        if (!tok.empty()) return tok;
      } else {
        tok.push_back(static_cast<char>(c));
      }
      c = in.get();
    }
    return tok;
  };
  if (next_token() != "P5") throw IoError("not a binary PGM file: " + path.string());
  const long width = parse_long(next_token(), "width");
  const long height = parse_long(next_token(), "height");
  const long maxval = parse_long(next_token(), "maxval");
  if (width <= 0 || height <= 0) throw ValidationError("PGM dimensions must be positive");
  if (maxval != 255) throw ValidationError("PGM maxval must be 255");
  Frame frame = make_frame(static_cast<int>(width), static_cast<int>(height));
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
    throw IoError("truncated PGM pixel data in " + path.string());
  return frame;
}

void save_pgm(const Frame& frame, const fs::path& path) {
  if (frame.width <= 0 || frame.height <= 0 ||
      frame.pixels.size() != static_cast<std::size_t>(frame.width) * frame.height)
    throw ValidationError("frame dimensions do not match its pixel count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace neckvitals
