#include "mvsync/evaluation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "mvsync/error.h"
#include "mvsync/parallel.h"

namespace mvsync {

void BeatAnnotation::validate() const {
  MVSYNC_CHECK(!times.empty(), "beat annotation '" + label + "' is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    MVSYNC_CHECK(std::isfinite(times[i]) && times[i] >= 0.0,
                 "beat annotation '" + label + "' has a negative time");
    if (i > 0) {
      MVSYNC_CHECK(times[i] > times[i - 1],
                   "beat annotation '" + label + "' is not strictly increasing at beat " +
                       std::to_string(i + 1));
    }
  }
}

BeatAnnotation load_beat_annotation(const std::filesystem::path& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  BeatAnnotation beats;
  beats.label = label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string cell = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) throw ParseError(path.string(), line_no, "non-numeric beat time");
    if (!beats.times.empty() && t <= beats.times.back()) {
      throw ParseError(path.string(), line_no, "beat times must be strictly increasing");
    }
    if (t < 0.0) throw ParseError(path.string(), line_no, "negative beat time");
    beats.times.push_back(t);
  }
  if (beats.times.empty()) throw ParseError(path.string(), 0, "file contains no beats");
  return beats;
}

void save_beat_annotation(const BeatAnnotation& beats, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[32];
  for (double t : beats.times) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out << buf << '\n';
  }
}

std::size_t beat_to_frame(double seconds, double hop, std::size_t frames) {
  MVSYNC_CHECK(hop > 0.0 && frames > 0, "beat_to_frame: bad arguments");
  const double one_based = std::round(seconds / hop);  // half away from zero
  const double clamped = std::clamp(one_based, 1.0, static_cast<double>(frames));
  return static_cast<std::size_t>(clamped) - 1;
}

double abd(const Correspondence& a_to_b, const BeatAnnotation& a, const BeatAnnotation& b,
           double hop) {
  MVSYNC_CHECK(!a.times.empty() && !b.times.empty(), "abd: empty beat annotation");
  MVSYNC_CHECK(a.times.size() == b.times.size(),
               "abd: '" + a.label + "' has " + std::to_string(a.times.size()) + " beats, '" +
                   b.label + "' has " + std::to_string(b.times.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const std::size_t frame = beat_to_frame(a.times[i], hop, a_to_b.source_length());
    const double mapped = frame_to_seconds(a_to_b.map(frame), hop);
    sum += std::abs(mapped - b.times[i]);
  }
  return 1000.0 * sum / static_cast<double>(a.times.size());
}

PairAbd pair_abd(const Correspondence& a_to_b, const BeatAnnotation& a, const BeatAnnotation& b,
                 double hop) {
  PairAbd out;
  out.label_a = a.label;
  out.label_b = b.label;
  out.forward = abd(a_to_b, a, b, hop);
  out.backward = abd(a_to_b.inverted(), b, a, hop);
  out.value = 0.5 * (out.forward + out.backward);
  return out;
}

double percentile(std::span<const double> values, double q) {
  MVSYNC_CHECK(!values.empty(), "percentile of an empty sample");
  MVSYNC_CHECK(q >= 0.0 && q <= 100.0, "percentile rank must lie in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CorpusStats corpus_stats(std::span<const double> values) {
  MVSYNC_CHECK(!values.empty(), "corpus_stats: no values");
  CorpusStats s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(s.count));
  return s;
}

Boxplot boxplot(std::span<const double> values) {
  Boxplot b;
  b.median = percentile(values, 50.0);
  b.p25 = percentile(values, 25.0);
  b.p75 = percentile(values, 75.0);
  const double iqr = b.p75 - b.p25;
  b.whisker_low = b.p25 - 1.5 * iqr;
  b.whisker_high = b.p75 + 1.5 * iqr;
  for (double v : values) {
    if (v < b.whisker_low || v > b.whisker_high) b.outliers.push_back(v);
  }
  return b;
}

// ---------------------------------------------------------------------------

char variant_letter(Variant v) { return static_cast<char>('A' + static_cast<int>(v)); }

Variant parse_variant(char letter) {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
  MVSYNC_CHECK(upper >= 'A' && upper <= 'G', std::string("unknown variant '") + letter + "'");
  return static_cast<Variant>(upper - 'A');
}

std::vector<Variant> parse_variants(const std::string& text) {
  std::vector<Variant> out;
  for (char c : text) {
    if (c == ',' || c == ' ') continue;
    const Variant v = parse_variant(c);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  MVSYNC_CHECK(!out.empty(), "no variants selected");
  return out;
}

std::string variant_description(Variant v) {
  switch (v) {
    case Variant::kA: return "pairwise alignment";
    case Variant::kB: return "progressive alignment";
    case Variant::kC: return "progressive without gap symbols";
    case Variant::kD: return "progressive with DTW-cost-based order";
    case Variant::kE: return "progressive with iterative alignment";
    case Variant::kF: return "progressive without onset features";
    case Variant::kG: return "pairwise without onset features";
  }
  return {};
}

void Corpus::validate() const {
  MVSYNC_CHECK(versions.size() >= 2, "corpus needs at least two versions");
  MVSYNC_CHECK(beats.size() == versions.size(), "corpus: beat annotations missing");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < versions.size(); ++i) {
    versions[i].validate();
    beats[i].validate();
    MVSYNC_CHECK(labels.insert(versions[i].label).second,
                 "duplicate label '" + versions[i].label + "'");
    MVSYNC_CHECK(beats[i].label == versions[i].label,
                 "beat annotation '" + beats[i].label + "' does not match version '" +
                     versions[i].label + "'");
    MVSYNC_CHECK(beats[i].times.size() == beats.front().times.size(),
                 "'" + beats[i].label + "' has a different beat count");
    MVSYNC_CHECK(versions[i].hop_duration == versions.front().hop_duration,
                 "versions use different hop durations");
  }
}

Corpus load_corpus(const std::filesystem::path& dir, double hop_duration) {
  MVSYNC_CHECK(std::filesystem::is_directory(dir), "corpus directory not found: " + dir.string());
  std::set<std::string> feature_labels;
  std::set<std::string> beat_labels;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".chroma.csv")) feature_labels.insert(name.substr(0, name.size() - 11));
    if (name.ends_with(".beats.csv")) beat_labels.insert(name.substr(0, name.size() - 10));
  }
  std::string unmatched;
  for (const auto& l : feature_labels)
    if (!beat_labels.count(l)) unmatched += " " + l + " (no beats)";
  for (const auto& l : beat_labels)
    if (!feature_labels.count(l)) unmatched += " " + l + " (no features)";
  MVSYNC_CHECK(unmatched.empty(), "unmatched labels in " + dir.string() + ":" + unmatched);

  Corpus corpus;
  for (const auto& label : feature_labels) {  // std::set iterates in label order
    corpus.versions.push_back(
        normalize_chroma(load_feature_sequence(dir / (label + ".chroma.csv"), hop_duration)));
    corpus.beats.push_back(load_beat_annotation(dir / (label + ".beats.csv"), label));
  }
  corpus.validate();
  return corpus;
}

namespace {

bool all_have_onsets(const Corpus& corpus) {
  return std::all_of(corpus.versions.begin(), corpus.versions.end(),
                     [](const FeatureSequence& v) { return v.has_onsets(); });
}

std::vector<FeatureSequence> with_measure_streams(const Corpus& corpus, CostMeasure measure) {
  std::vector<FeatureSequence> out = corpus.versions;
  if (measure == CostMeasure::kChromaCosine) {
    for (auto& v : out) v.onset.reset();
  }
  return out;
}

}  // namespace

CostConfig variant_cost_config(Variant v, const Corpus& corpus, const ExperimentOptions& options) {
  const bool chroma_only = v == Variant::kF || v == Variant::kG || !all_have_onsets(corpus);
  CostConfig cfg = default_cost_config(
      chroma_only ? CostMeasure::kChromaCosine : CostMeasure::kChromaCosineOnsetEuclidean,
      options.onset_cost_cap);
  cfg.weights = options.weights;
  if (options.gap_penalty) cfg.gap_penalty = *options.gap_penalty;
  cfg.gap_mode = v == Variant::kC ? GapMode::kCopyFeatures : GapMode::kInsertGaps;
  return cfg;
}

VariantReport run_variant(Variant v, const Corpus& corpus, const ExperimentOptions& options) {
  corpus.validate();
  const auto start = std::chrono::steady_clock::now();
  VariantReport report;
  report.variant = v;
  report.cost = variant_cost_config(v, corpus, options);
  report.progressive = v != Variant::kA && v != Variant::kG;
  report.iterations = v == Variant::kE ? 2 : 1;

  // Onset streams are dropped for chroma-only variants so every version carries exactly the
  // streams its measure reads.
  const std::vector<FeatureSequence> versions = with_measure_streams(corpus, report.cost.measure);
  const std::size_t k = versions.size();
  const double hop = versions.front().hop_duration;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  report.per_pair.resize(pairs.size());

  if (!report.progressive) {
    parallel_for(pairs.size(), options.jobs, [&](std::size_t p) {
      const auto [i, j] = pairs[p];
      const AlignmentPath path = align_pair(versions[i], versions[j], report.cost,
                                            options.alignment_ms);
      report.per_pair[p] =
          pair_abd(Correspondence::from_path(path), corpus.beats[i], corpus.beats[j], hop);
    });
  } else {
    const OrderStrategy strategy =
        v == Variant::kD ? OrderStrategy::kDtwCost : OrderStrategy::kLengthAscending;
    report.order = make_order(strategy, versions, report.cost, options.ordering_ms, options.jobs);
    const Template z = iterative_align(versions, report.order->permutation, report.iterations,
                                       report.cost, options.alignment_ms, &report.steps);
    std::vector<std::size_t> row_of(k);
    for (std::size_t i = 0; i < k; ++i) row_of[i] = find_row(z, versions[i].label);
    parallel_for(pairs.size(), options.jobs, [&](std::size_t p) {
      const auto [i, j] = pairs[p];
      report.per_pair[p] = pair_abd(pairwise_from_template(z, row_of[i], row_of[j]),
                                    corpus.beats[i], corpus.beats[j], hop);
    });
  }

  std::vector<double> values;
  for (const auto& pair : report.per_pair) values.push_back(pair.value);
  report.stats = corpus_stats(values);
  report.box = boxplot(values);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport run_experiment_matrix(const Corpus& corpus, const ExperimentOptions& options) {
  corpus.validate();
  ExperimentReport report;
  report.options = options;
  for (const auto& v : corpus.versions) report.labels.push_back(v.label);
  for (Variant v : options.variants) report.variants.push_back(run_variant(v, corpus, options));
  return report;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const CostConfig& cfg) {
  return {{"measure", to_string(cfg.measure)},
          {"weights", {cfg.weights.diagonal, cfg.weights.vertical, cfg.weights.horizontal}},
          {"gap_penalty", cfg.gap_penalty},
          {"gap_mode", to_string(cfg.gap_mode)}};
}

nlohmann::json to_json(const MultiscaleConfig& ms) {
  return {{"enabled", ms.enabled}, {"factors", ms.factors}, {"band_radius", ms.band_radius}};
}

nlohmann::json to_json(const OrderPlan& plan, const std::vector<std::string>& labels) {
  nlohmann::json out;
  out["strategy"] = to_string(plan.strategy);
  nlohmann::json perm = nlohmann::json::array();
  nlohmann::json perm_labels = nlohmann::json::array();
  for (std::size_t i : plan.permutation) {
    perm.push_back(i + 1);
    perm_labels.push_back(labels[i]);
  }
  out["permutation"] = perm;
  out["permutation_labels"] = perm_labels;
  if (plan.pairwise_avg_costs) out["pairwise_avg_costs"] = *plan.pairwise_avg_costs;
  return out;
}

nlohmann::json to_json(const AlignmentStep& step) {
  nlohmann::json out = {{"iteration", step.iteration},
                        {"label", step.label},
                        {"total_cost", step.total_cost},
                        {"average_cost", step.average_cost},
                        {"path_length", step.path_length},
                        {"template_length", step.template_length}};
  if (!std::isnan(step.previous_average_cost)) {
    out["previous_average_cost"] = step.previous_average_cost;
  }
  return out;
}

nlohmann::json to_json(const CorpusStats& stats) {
  return {{"count", stats.count}, {"min", stats.min}, {"mean", stats.mean},
          {"max", stats.max},     {"std", stats.std}};
}

nlohmann::json to_json(const Boxplot& box) {
  return {{"median", box.median},           {"p25", box.p25},
          {"p75", box.p75},                 {"whisker_low", box.whisker_low},
          {"whisker_high", box.whisker_high}, {"outliers", box.outliers}};
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["labels"] = report.labels;
  doc["config"] = {{"weights",
                    {report.options.weights.diagonal, report.options.weights.vertical,
                     report.options.weights.horizontal}},
                   {"gap_penalty", report.options.gap_penalty
                                       ? nlohmann::json(*report.options.gap_penalty)
                                       : nlohmann::json("measure-maximum")},
                   {"onset_cost_cap", report.options.onset_cost_cap},
                   {"alignment_multiscale", to_json(report.options.alignment_ms)},
                   {"ordering_multiscale", to_json(report.options.ordering_ms)},
                   {"std_definition", "population"},
                   {"abd_direction", "mean of both directions"},
                   {"beat_rounding", "half away from zero, clamped"}};

  nlohmann::json variants = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& v : report.variants) {
    nlohmann::json entry;
    entry["description"] = variant_description(v.variant);
    entry["cost"] = to_json(v.cost);
    entry["progressive"] = v.progressive;
    entry["iterations"] = v.iterations;
    if (v.order) entry["order"] = to_json(*v.order, report.labels);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : v.steps) steps.push_back(to_json(s));
    entry["steps"] = steps;
    nlohmann::json per_pair = nlohmann::json::object();
    for (const auto& p : v.per_pair) {
      per_pair[p.label_a + "|" + p.label_b] = {
          {"abd_ms", p.value}, {"forward_ms", p.forward}, {"backward_ms", p.backward}};
    }
    entry["per_pair"] = per_pair;
    entry["stats"] = to_json(v.stats);
    entry["boxplot"] = to_json(v.box);
    const std::string key(1, variant_letter(v.variant));
    variants[key] = entry;
    timings[key] = v.elapsed_seconds;
  }
  doc["variants"] = variants;

  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["run_info"] = {{"generated_at", stamp}, {"elapsed_seconds", timings}};
  return doc;
}

void write_abd_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "variant,label_a,label_b,abd_ms,abd_forward_ms,abd_backward_ms\n";
  char buf[128];
  for (const auto& v : report.variants) {
    for (const auto& p : v.per_pair) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.value, p.forward, p.backward);
      out << variant_letter(v.variant) << ',' << p.label_a << ',' << p.label_b << ',' << buf
          << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace mvsync
