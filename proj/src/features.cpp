#include "mvsync/features.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvsync/error.h"

namespace mvsync {

FrameMatrix::FrameMatrix(std::size_t frames, std::size_t dim, double fill)
    : dim_(dim), data_(frames * dim, fill) {}

FrameMatrix FrameMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  FrameMatrix out;
  for (const auto& row : rows) out.push_back(row);
  return out;
}

void FrameMatrix::push_back(std::span<const double> frame) {
  if (data_.empty() && dim_ == 0) dim_ = frame.size();
  MVSYNC_CHECK(frame.size() == dim_ && dim_ > 0,
               "frame dimension " + std::to_string(frame.size()) + " does not match " +
                   std::to_string(dim_));
  data_.insert(data_.end(), frame.begin(), frame.end());
}

void FeatureSequence::validate() const {
  MVSYNC_CHECK(size() >= 1, "feature sequence '" + label + "' is empty");
  MVSYNC_CHECK(hop_duration > 0.0, "feature sequence '" + label + "' has non-positive hop");
  if (onset) {
    MVSYNC_CHECK(onset->size() == size(), "onset stream of '" + label + "' has " +
                                              std::to_string(onset->size()) +
                                              " frames, chroma has " + std::to_string(size()));
  }
}

FrameBundle bundle_at(const FeatureSequence& seq, std::size_t index) {
  FrameBundle b;
  b.chroma = seq.chroma[index];
  if (seq.onset) b.onset = (*seq.onset)[index];
  return b;
}

void CostConfig::validate() const {
  MVSYNC_CHECK(weights.diagonal > 0 && weights.vertical > 0 && weights.horizontal > 0,
               "step weights must be positive");
  MVSYNC_CHECK(gap_penalty > 0, "gap penalty must be positive");
}

double max_local_cost(CostMeasure measure, double onset_cost_cap) {
  return measure == CostMeasure::kChromaCosine ? 1.0 : 1.0 + onset_cost_cap;
}

CostConfig default_cost_config(CostMeasure measure, double onset_cost_cap) {
  CostConfig cfg;
  cfg.measure = measure;
  cfg.gap_penalty = max_local_cost(measure, onset_cost_cap);
  return cfg;
}

std::string to_string(CostMeasure measure) {
  return measure == CostMeasure::kChromaCosine ? "chroma-cosine"
                                               : "chroma-cosine-plus-onset-euclidean";
}

std::string to_string(GapMode mode) {
  return mode == GapMode::kInsertGaps ? "insert-gaps" : "copy-features";
}

CostMeasure parse_cost_measure(const std::string& text) {
  if (text == "chroma-cosine" || text == "chroma") return CostMeasure::kChromaCosine;
  if (text == "chroma-cosine-plus-onset-euclidean" || text == "combined")
    return CostMeasure::kChromaCosineOnsetEuclidean;
  throw Error("unknown cost measure '" + text + "'");
}

GapMode parse_gap_mode(const std::string& text) {
  if (text == "insert-gaps" || text == "gaps") return GapMode::kInsertGaps;
  if (text == "copy-features" || text == "copy") return GapMode::kCopyFeatures;
  throw Error("unknown gap mode '" + text + "'");
}

double cosine_cost(std::span<const double> x, std::span<const double> y) {
  MVSYNC_CHECK(x.size() == y.size(), "cosine_cost: dimension mismatch");
  if (std::equal(x.begin(), x.end(), y.begin())) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return std::max(0.0, 1.0 - dot);
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  MVSYNC_CHECK(x.size() == y.size(), "euclidean_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double combined_cost(const FrameBundle& x, const FrameBundle& y) {
  MVSYNC_CHECK(!x.onset.empty() && !y.onset.empty(),
               "combined cost needs onset frames on both sides");
  return cosine_cost(x.chroma, y.chroma) + euclidean_distance(x.onset, y.onset);
}

double local_cost(const FrameBundle& x, const FrameBundle& y, CostMeasure measure) {
  MVSYNC_CHECK(!x.gap && !y.gap, "local cost is undefined for gap symbols");
  if (measure == CostMeasure::kChromaCosine) return cosine_cost(x.chroma, y.chroma);
  return combined_cost(x, y);
}

void normalize_frame(std::span<double> frame, double silence_threshold) {
  double sum = 0.0;
  for (double v : frame) {
    MVSYNC_CHECK(v >= 0.0, "normalize_chroma: negative entry");
    sum += v * v;
  }
  const double norm = std::sqrt(sum);
  if (norm < silence_threshold) {
    const double uniform = 1.0 / std::sqrt(static_cast<double>(frame.size()));
    std::fill(frame.begin(), frame.end(), uniform);
    return;
  }
  for (double& v : frame) v /= norm;
}

FeatureSequence normalize_chroma(const FeatureSequence& seq, double silence_threshold) {
  FeatureSequence out = seq;
  for (std::size_t i = 0; i < out.chroma.size(); ++i) {
    normalize_frame(out.chroma[i], silence_threshold);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

FrameMatrix read_frame_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");

  FrameMatrix frames;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    row.clear();
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      const std::string cell =
          trim(std::string_view(text).substr(pos, comma == std::string::npos ? text.npos : comma - pos));
      double value = 0.0;
      const auto* begin = cell.data();
      const auto* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(path.string(), line_no, "non-numeric cell '" + cell + "'");
      }
      if (value < 0.0) {
        throw ParseError(path.string(), line_no, "negative value " + cell);
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!frames.empty() && row.size() != frames.dim()) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(frames.dim()) + " columns, found " +
                           std::to_string(row.size()));
    }
    frames.push_back(row);
  }
  if (frames.empty()) throw ParseError(path.string(), 0, "file contains no frames");
  return frames;
}

void write_frame_csv(const std::filesystem::path& path, const FrameMatrix& frames) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto row = frames[i];
    for (std::size_t d = 0; d < row.size(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", row[d]);
      if (d > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::string label_from_path(const std::filesystem::path& chroma_path) {
  const std::string name = chroma_path.filename().string();
  constexpr std::string_view suffix = ".chroma.csv";
  if (name.size() > suffix.size() && name.ends_with(suffix)) {
    return name.substr(0, name.size() - suffix.size());
  }
  return chroma_path.stem().string();
}

std::filesystem::path onset_companion_path(const std::filesystem::path& chroma_path) {
  return chroma_path.parent_path() / (label_from_path(chroma_path) + ".onset.csv");
}

FeatureSequence load_feature_sequence(const std::filesystem::path& chroma_path,
                                      double hop_duration) {
  if (!std::filesystem::exists(chroma_path)) {
    throw ParseError(chroma_path.string(), 0, "no such file");
  }
  FeatureSequence seq;
  seq.label = label_from_path(chroma_path);
  seq.hop_duration = hop_duration;
  seq.chroma = read_frame_csv(chroma_path);
  const auto onset_path = onset_companion_path(chroma_path);
  if (onset_path != chroma_path && std::filesystem::exists(onset_path)) {
    seq.onset = read_frame_csv(onset_path);
    if (seq.onset->size() != seq.chroma.size()) {
      throw ParseError(onset_path.string(), 0,
                       "onset file has " + std::to_string(seq.onset->size()) +
                           " rows, chroma file has " + std::to_string(seq.chroma.size()));
    }
  }
  seq.validate();
  return seq;
}

void save_feature_sequence(const FeatureSequence& seq, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_frame_csv(dir / (seq.label + ".chroma.csv"), seq.chroma);
  if (seq.onset) write_frame_csv(dir / (seq.label + ".onset.csv"), *seq.onset);
}

}  // namespace mvsync
