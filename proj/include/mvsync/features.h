#pragma once

/// @file features.h
/// @brief Feature sequences, local cost measures, and feature CSV I/O.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mvsync {

inline constexpr std::size_t kChromaDim = 12;
inline constexpr double kDefaultHopDuration = 0.020;
inline constexpr double kDefaultSilenceThreshold = 1e-6;

/// @brief Dense row-major storage of equally sized frames.
class FrameMatrix {
 public:
  FrameMatrix() = default;
  FrameMatrix(std::size_t frames, std::size_t dim, double fill = 0.0);

  static FrameMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  /// Appends a frame. The first frame pushed into an empty matrix fixes the dimension.
  void push_back(std::span<const double> frame);

  const std::vector<double>& data() const { return data_; }

  bool operator==(const FrameMatrix& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// @brief One version of a piece: chroma frames plus an optional parallel onset stream.
struct FeatureSequence {
  FrameMatrix chroma;
  std::optional<FrameMatrix> onset;
  double hop_duration = kDefaultHopDuration;
  std::string label;

  std::size_t size() const { return chroma.size(); }
  bool has_onsets() const { return onset.has_value(); }

  /// Throws mvsync::Error if any structural invariant is violated.
  void validate() const;

  bool operator==(const FeatureSequence& other) const = default;
};

/// @brief Non-owning view of a single frame position, or the gap symbol.
///
/// A gap is identified by the flag alone. Its spans are empty.
struct FrameBundle {
  std::span<const double> chroma;
  std::span<const double> onset;
  bool gap = false;

  static FrameBundle gap_symbol() { return FrameBundle{{}, {}, true}; }
};

FrameBundle bundle_at(const FeatureSequence& seq, std::size_t index);

enum class CostMeasure {
  kChromaCosine,
  kChromaCosineOnsetEuclidean,
};

enum class GapMode {
  kInsertGaps,
  kCopyFeatures,
};

/// DTW step weights. `vertical` applies to a (1,0) step, `horizontal` to (0,1).
struct StepWeights {
  double diagonal = 2.0;
  double vertical = 1.5;
  double horizontal = 1.5;

  bool operator==(const StepWeights& other) const = default;
};

inline constexpr double kDefaultOnsetCostCap = 1.4142135623730951;  // sqrt(2)

struct CostConfig {
  CostMeasure measure = CostMeasure::kChromaCosine;
  StepWeights weights;
  double gap_penalty = 1.0;
  GapMode gap_mode = GapMode::kInsertGaps;

  void validate() const;
};

/// Largest value the measure can take on normalized non-negative frames.
/// The onset part is unbounded in general, so its contribution is capped by `onset_cost_cap`.
double max_local_cost(CostMeasure measure, double onset_cost_cap = kDefaultOnsetCostCap);

/// Paper-default configuration for a measure: weights (2, 1.5, 1.5), gap penalty at the
/// measure's maximum, gap insertion enabled.
CostConfig default_cost_config(CostMeasure measure,
                               double onset_cost_cap = kDefaultOnsetCostCap);

std::string to_string(CostMeasure measure);
std::string to_string(GapMode mode);
CostMeasure parse_cost_measure(const std::string& text);
GapMode parse_gap_mode(const std::string& text);

/// 1 - <x, y>, clamped at zero. Frames are expected to be unit-norm and non-negative.
double cosine_cost(std::span<const double> x, std::span<const double> y);

double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// Cosine cost on chroma plus Euclidean distance on onset frames.
double combined_cost(const FrameBundle& x, const FrameBundle& y);

double local_cost(const FrameBundle& x, const FrameBundle& y, CostMeasure measure);

/// Scales a frame to unit norm in place; frames quieter than `silence_threshold` become
/// the uniform unit vector.
void normalize_frame(std::span<double> frame, double silence_threshold = kDefaultSilenceThreshold);

/// Normalizes every chroma frame. Onset frames are left untouched.
FeatureSequence normalize_chroma(const FeatureSequence& seq,
                                 double silence_threshold = kDefaultSilenceThreshold);

// ---------------------------------------------------------------------------
// CSV I/O

FrameMatrix read_frame_csv(const std::filesystem::path& path);
void write_frame_csv(const std::filesystem::path& path, const FrameMatrix& frames);

/// "<dir>/<label>.chroma.csv" -> "<label>"; other names fall back to the stem.
std::string label_from_path(const std::filesystem::path& chroma_path);

/// "<dir>/<label>.chroma.csv" -> "<dir>/<label>.onset.csv".
std::filesystem::path onset_companion_path(const std::filesystem::path& chroma_path);

/// Loads a chroma CSV and, when present, its onset companion file. Values are taken as-is.
FeatureSequence load_feature_sequence(const std::filesystem::path& chroma_path,
                                      double hop_duration = kDefaultHopDuration);

/// Writes `<dir>/<label>.chroma.csv` (and `.onset.csv` when the onset stream exists).
void save_feature_sequence(const FeatureSequence& seq, const std::filesystem::path& dir);

}  // namespace mvsync
