#pragma once

/// @file evaluation.h
/// @brief Average beat deviation (ABD) and the variant experiment matrix.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mvsync/correspondence.h"
#include "mvsync/features.h"
#include "mvsync/multiscale.h"
#include "mvsync/ordering.h"
#include "mvsync/progressive.h"

namespace mvsync {

/// @brief Ground-truth beat times of one version, in seconds.
struct BeatAnnotation {
  std::vector<double> times;
  std::string label;

  /// Non-empty, non-negative, strictly increasing.
  void validate() const;
};

BeatAnnotation load_beat_annotation(const std::filesystem::path& path, const std::string& label);
void save_beat_annotation(const BeatAnnotation& beats, const std::filesystem::path& path);

/// Seconds -> 0-based frame: round(t / hop) half away from zero as a 1-based frame, clamped
/// to [1, frames], minus one.
std::size_t beat_to_frame(double seconds, double hop, std::size_t frames);

/// 0-based frame -> seconds (frame n sits at (n + 1) * hop).
inline double frame_to_seconds(std::size_t frame, double hop) {
  return static_cast<double>(frame + 1) * hop;
}

/// Mean absolute deviation in milliseconds between beats of `a` mapped through `a_to_b` and
/// the annotated beats of `b` with the same index.
double abd(const Correspondence& a_to_b, const BeatAnnotation& a, const BeatAnnotation& b,
           double hop);

struct PairAbd {
  std::string label_a;
  std::string label_b;
  double forward = 0.0;   ///< a -> b
  double backward = 0.0;  ///< b -> a
  double value = 0.0;     ///< mean of both directions
};

PairAbd pair_abd(const Correspondence& a_to_b, const BeatAnnotation& a, const BeatAnnotation& b,
                 double hop);

struct CorpusStats {
  std::size_t count = 0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double std = 0.0;  ///< population
};

struct Boxplot {
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double whisker_low = 0.0;   ///< p25 - 1.5 IQR
  double whisker_high = 0.0;  ///< p75 + 1.5 IQR
  std::vector<double> outliers;
};

/// Linear interpolation between closest ranks; q in [0, 100].
double percentile(std::span<const double> values, double q);

CorpusStats corpus_stats(std::span<const double> values);
Boxplot boxplot(std::span<const double> values);

// ---------------------------------------------------------------------------
// Experiment matrix

/// A: pairwise. B: progressive. C: B copying features instead of gaps. D: B with DTW-cost
/// order. E: B with two iterations. F: B on chroma only. G: A on chroma only.
enum class Variant { kA, kB, kC, kD, kE, kF, kG };

char variant_letter(Variant v);
Variant parse_variant(char letter);
std::vector<Variant> parse_variants(const std::string& text);
std::string variant_description(Variant v);

struct Corpus {
  std::vector<FeatureSequence> versions;
  std::vector<BeatAnnotation> beats;  ///< parallel to versions

  void validate() const;
};

/// Loads every `<label>.chroma.csv` in `dir` with its `.onset.csv` and `.beats.csv`.
/// Chroma is normalized on load.
Corpus load_corpus(const std::filesystem::path& dir, double hop_duration = kDefaultHopDuration);

struct ExperimentOptions {
  std::vector<Variant> variants{Variant::kA, Variant::kB};
  StepWeights weights;
  std::optional<double> gap_penalty;  ///< default: maximum of the variant's cost measure
  double onset_cost_cap = kDefaultOnsetCostCap;
  MultiscaleConfig alignment_ms;      ///< disabled by default
  MultiscaleConfig ordering_ms{{8, 4, 2, 1}, 25, true};
  std::size_t jobs = 1;
};

struct VariantReport {
  Variant variant = Variant::kA;
  CostConfig cost;
  bool progressive = false;
  std::size_t iterations = 1;
  std::optional<OrderPlan> order;
  std::vector<AlignmentStep> steps;
  std::vector<PairAbd> per_pair;  ///< pairs (i, j), i < j in corpus order
  CorpusStats stats;
  Boxplot box;
  double elapsed_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<std::string> labels;
  std::vector<VariantReport> variants;
  ExperimentOptions options;
};

/// Cost configuration a variant runs with on this corpus.
CostConfig variant_cost_config(Variant v, const Corpus& corpus, const ExperimentOptions& options);

VariantReport run_variant(Variant v, const Corpus& corpus, const ExperimentOptions& options);

ExperimentReport run_experiment_matrix(const Corpus& corpus, const ExperimentOptions& options);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const CostConfig& cfg);
nlohmann::json to_json(const MultiscaleConfig& ms);
nlohmann::json to_json(const OrderPlan& plan, const std::vector<std::string>& labels);
nlohmann::json to_json(const AlignmentStep& step);
nlohmann::json to_json(const CorpusStats& stats);
nlohmann::json to_json(const Boxplot& box);

/// Report document. Wall-clock data lives under "run_info" only.
nlohmann::json to_json(const ExperimentReport& report);

/// One line per (variant, pair): variant,label_a,label_b,abd_ms,abd_forward_ms,abd_backward_ms
void write_abd_csv(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace mvsync
