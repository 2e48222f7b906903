// mvsync: multi-version music alignment and beat-deviation evaluation.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mvsync/correspondence.h"
#include "mvsync/error.h"
#include "mvsync/evaluation.h"
#include "mvsync/features.h"
#include "mvsync/multiscale.h"
#include "mvsync/ordering.h"
#include "mvsync/pairwise.h"
#include "mvsync/parallel.h"
#include "mvsync/progressive.h"
#include "mvsync/synthetic.h"
#include "mvsync/template.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mvsync;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;

struct CommonOptions {
  double hop = kDefaultHopDuration;
  std::string weights = "2,1.5,1.5";
  std::string measure = "auto";
  bool multiscale = false;
  std::string factors = "8,4,2,1";
  std::size_t radius = 25;
};

struct AlignPairOptions {
  std::vector<std::string> inputs;
  std::string out;
};

struct AlignMultiOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string order = "length-ascending";
  std::size_t iterations = 1;
  std::string gap_mode = "insert-gaps";
  std::optional<double> gap_penalty;
  std::size_t jobs = 0;
};

struct EvaluateOptions {
  std::string corpus;
  std::string variants = "A,B";
  std::string out_dir;
  std::optional<double> gap_penalty;
  std::size_t jobs = 0;
};

struct SynthOptions {
  std::string out_dir;
  SyntheticCorpusSpec spec;
  bool no_onsets = false;
};

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(flag + ": '" + item + "' is not a number");
    values.push_back(value);
  }
  return values;
}

StepWeights parse_weights(const std::string& text) {
  const auto w = parse_number_list(text, "--weights");
  if (w.size() != 3) throw Error("--weights: expected three comma-separated values");
  for (double v : w) {
    if (!(v > 0.0)) throw Error("--weights: weights must be positive");
  }
  return {w[0], w[1], w[2]};
}

MultiscaleConfig parse_multiscale(const CommonOptions& common) {
  MultiscaleConfig ms;
  ms.enabled = common.multiscale;
  ms.band_radius = common.radius;
  ms.factors.clear();
  for (double f : parse_number_list(common.factors, "--factors")) {
    if (!(f >= 1.0) || f != static_cast<double>(static_cast<std::size_t>(f))) {
      throw Error("--factors: factors must be positive integers");
    }
    ms.factors.push_back(static_cast<std::size_t>(f));
  }
  try {
    ms.validate();
  } catch (const Error& e) {
    throw Error(std::string("--factors/--radius: ") + e.what());
  }
  return ms;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Error("input file not found: " + path);
}

std::vector<FeatureSequence> load_inputs(const std::vector<std::string>& paths, double hop) {
  std::vector<FeatureSequence> versions;
  for (const auto& p : paths) {
    require_file(p);
    versions.push_back(normalize_chroma(load_feature_sequence(p, hop)));
  }
  return versions;
}

CostMeasure resolve_measure(const std::string& text, const std::vector<FeatureSequence>& versions) {
  bool all_onsets = true;
  for (const auto& v : versions) all_onsets = all_onsets && v.has_onsets();
  if (text == "auto") {
    return all_onsets ? CostMeasure::kChromaCosineOnsetEuclidean : CostMeasure::kChromaCosine;
  }
  const CostMeasure m = parse_cost_measure(text);
  if (m == CostMeasure::kChromaCosineOnsetEuclidean && !all_onsets) {
    throw Error("--measure combined requires an onset file for every input");
  }
  return m;
}

void drop_unused_streams(std::vector<FeatureSequence>& versions, CostMeasure measure) {
  if (measure == CostMeasure::kChromaCosine) {
    for (auto& v : versions) v.onset.reset();
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory: " + dir);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return stamp;
}

void write_correspondence_csv(const fs::path& path, const Correspondence& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : c.pairs()) out << p.n + 1 << ',' << p.m + 1 << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

json common_json(const CommonOptions& common, const CostConfig& cfg, const MultiscaleConfig& ms) {
  return {{"hop_duration", common.hop}, {"cost", to_json(cfg)}, {"alignment_multiscale", to_json(ms)}};
}

int run_align_pair(const CommonOptions& common, const AlignPairOptions& opt) {
  if (opt.inputs.size() != 2) throw Error("align-pair: exactly two input files are required");
  auto versions = load_inputs(opt.inputs, common.hop);
  const CostMeasure measure = resolve_measure(common.measure, versions);
  drop_unused_streams(versions, measure);
  CostConfig cfg = default_cost_config(measure);
  cfg.weights = parse_weights(common.weights);
  const MultiscaleConfig ms = parse_multiscale(common);

  const AlignmentPath path = align_pair(versions[0], versions[1], cfg, ms);
  const fs::path out(opt.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  write_path_csv(out, path);
  std::printf("total_cost=%.17g\naverage_cost=%.17g\npath_length=%zu\n", path.total_cost,
              average_cost(path), path.length());
  return kExitOk;
}

int run_align_multi(const CommonOptions& common, const AlignMultiOptions& opt) {
  if (opt.inputs.size() < 2) throw Error("align-multi: at least two input files are required");
  if (opt.iterations < 1) throw Error("--iterations must be at least 1");
  auto versions = load_inputs(opt.inputs, common.hop);
  const CostMeasure measure = resolve_measure(common.measure, versions);
  drop_unused_streams(versions, measure);
  CostConfig cfg = default_cost_config(measure);
  cfg.weights = parse_weights(common.weights);
  cfg.gap_mode = parse_gap_mode(opt.gap_mode);
  if (opt.gap_penalty) cfg.gap_penalty = *opt.gap_penalty;
  cfg.validate();
  const MultiscaleConfig ms = parse_multiscale(common);
  const MultiscaleConfig ordering_ms{{8, 4, 2, 1}, 25, true};
  const OrderStrategy strategy = parse_order_strategy(opt.order);
  ensure_dir(opt.out_dir);

  const OrderPlan plan = make_order(strategy, versions, cfg, ordering_ms, resolve_jobs(opt.jobs));
  std::vector<AlignmentStep> steps;
  const Template z = iterative_align(versions, plan.permutation, opt.iterations, cfg, ms, &steps);

  const fs::path dir(opt.out_dir);
  write_template(z, dir / "template.csv", dir / "template.json");
  const fs::path corr_dir = dir / "correspondences";
  ensure_dir(corr_dir.string());

  std::vector<std::string> labels;
  for (const auto& v : versions) labels.push_back(v.label);
  json pairs = json::array();
  for (std::size_t i = 0; i < versions.size(); ++i) {
    for (std::size_t j = i + 1; j < versions.size(); ++j) {
      const std::string name = labels[i] + "__" + labels[j] + ".csv";
      write_correspondence_csv(
          corr_dir / name,
          pairwise_from_template(z, find_row(z, labels[i]), find_row(z, labels[j])));
      pairs.push_back({{"label_a", labels[i]}, {"label_b", labels[j]},
                       {"file", "correspondences/" + name}});
    }
  }

  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "align-multi";
  doc["inputs"] = opt.inputs;
  doc["labels"] = labels;
  doc["config"] = common_json(common, cfg, ms);
  doc["config"]["ordering_multiscale"] = to_json(ordering_ms);
  doc["config"]["iterations"] = opt.iterations;
  doc["order"] = to_json(plan, labels);
  json step_list = json::array();
  for (const auto& s : steps) step_list.push_back(to_json(s));
  doc["steps"] = step_list;
  json gaps = json::object();
  for (std::size_t r = 0; r < z.rows(); ++r) gaps[z.label(r)] = z.gap_count(r);
  doc["template"] = {{"length", z.length()}, {"rows", z.labels()}, {"gap_counts", gaps}};
  doc["correspondences"] = pairs;
  doc["run_info"] = {{"generated_at", utc_timestamp()}};
  write_json(dir / "report.json", doc);
  return kExitOk;
}

int run_evaluate(const CommonOptions& common, const EvaluateOptions& opt) {
  if (!fs::is_directory(opt.corpus)) throw Error("corpus directory not found: " + opt.corpus);
  if (common.measure != "auto") {
    throw Error("--measure is fixed per variant for evaluate; leave it at auto");
  }
  const Corpus corpus = load_corpus(opt.corpus, common.hop);
  ExperimentOptions options;
  options.variants = parse_variants(opt.variants);
  options.weights = parse_weights(common.weights);
  options.gap_penalty = opt.gap_penalty;
  options.alignment_ms = parse_multiscale(common);
  options.jobs = resolve_jobs(opt.jobs);
  ensure_dir(opt.out_dir);

  const ExperimentReport report = run_experiment_matrix(corpus, options);
  json doc = to_json(report);
  doc["command"] = "evaluate";
  doc["config"]["hop_duration"] = common.hop;
  doc["config"]["corpus"] = opt.corpus;
  const fs::path dir(opt.out_dir);
  write_json(dir / "report.json", doc);
  write_abd_csv(report, dir / "abd.csv");
  return kExitOk;
}

int run_synth(const SynthOptions& opt) {
  SyntheticCorpusSpec spec = opt.spec;
  spec.with_onsets = !opt.no_onsets;
  spec.validate();
  ensure_dir(opt.out_dir);
  const SyntheticCorpus corpus = generate_synthetic_corpus(spec);
  const fs::path dir(opt.out_dir);
  json files = json::array();
  for (std::size_t v = 0; v < corpus.versions.size(); ++v) {
    const auto& seq = corpus.versions[v];
    save_feature_sequence(seq, dir);
    save_beat_annotation({corpus.beat_times[v], seq.label}, dir / (seq.label + ".beats.csv"));
    json entry = {{"label", seq.label},
                  {"frames", seq.size()},
                  {"chroma", seq.label + ".chroma.csv"},
                  {"beats", seq.label + ".beats.csv"}};
    if (seq.has_onsets()) entry["onset"] = seq.label + ".onset.csv";
    files.push_back(entry);
  }
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "synth";
  doc["spec"] = {{"versions", spec.num_versions},
                 {"length", spec.base_length},
                 {"warp", spec.warp_strength},
                 {"noise", spec.noise_level},
                 {"articulation", spec.articulation_perturbation},
                 {"silence", spec.silence_rate},
                 {"beat_every", spec.beat_every},
                 {"hop", spec.hop_duration},
                 {"onsets", spec.with_onsets},
                 {"seed", spec.seed}};
  doc["files"] = files;
  write_json(dir / "manifest.json", doc);
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& common, bool with_measure) {
  cmd->add_option("--hop", common.hop, "Hop duration in seconds")->capture_default_str();
  cmd->add_option("--weights", common.weights, "Step weights w1,w2,w3 (diagonal, vertical, horizontal)")
      ->capture_default_str();
  if (with_measure) {
    cmd->add_option("--measure", common.measure, "auto, chroma, or combined")->capture_default_str();
  }
  cmd->add_flag("--multiscale", common.multiscale, "Use multiscale DTW for alignment");
  cmd->add_option("--factors", common.factors, "Multiscale downsampling factors")
      ->capture_default_str();
  cmd->add_option("--radius", common.radius, "Multiscale band radius in frames")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-version music alignment and beat-deviation evaluation"};
  app.require_subcommand(1);

  CommonOptions common;

  AlignPairOptions pair_opt;
  auto* pair_cmd = app.add_subcommand("align-pair", "Align two versions with DTW");
  pair_cmd->add_option("inputs", pair_opt.inputs, "Two <label>.chroma.csv files")->required();
  pair_cmd->add_option("--out", pair_opt.out, "Alignment CSV to write")->required();
  add_common(pair_cmd, common, true);

  AlignMultiOptions multi_opt;
  auto* multi_cmd = app.add_subcommand("align-multi", "Progressive template alignment");
  multi_cmd->add_option("inputs", multi_opt.inputs, "Two or more <label>.chroma.csv files")
      ->required();
  multi_cmd->add_option("--out-dir", multi_opt.out_dir, "Output directory")->required();
  multi_cmd->add_option("--order", multi_opt.order,
                        "length-ascending, length-descending, dtw-cost, or as-given")
      ->capture_default_str();
  multi_cmd->add_option("--iterations", multi_opt.iterations, "Alignment passes")
      ->capture_default_str();
  multi_cmd->add_option("--gap-mode", multi_opt.gap_mode, "insert-gaps or copy-features")
      ->capture_default_str();
  multi_cmd->add_option("--gap-penalty", multi_opt.gap_penalty,
                        "Gap penalty (default: maximum of the cost measure)");
  multi_cmd->add_option("--jobs", multi_opt.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_common(multi_cmd, common, true);

  EvaluateOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("evaluate", "Run experiment variants and report ABD");
  eval_cmd->add_option("--corpus", eval_opt.corpus, "Directory with chroma, onset, beats files")
      ->required();
  eval_cmd->add_option("--variants", eval_opt.variants, "Comma-separated letters A-G")
      ->capture_default_str();
  eval_cmd->add_option("--out-dir", eval_opt.out_dir, "Output directory")->required();
  eval_cmd->add_option("--gap-penalty", eval_opt.gap_penalty,
                       "Gap penalty (default: maximum of each variant's measure)");
  eval_cmd->add_option("--jobs", eval_opt.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_common(eval_cmd, common, false);

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  auto& s = synth_opt.spec;
  synth_cmd->add_option("--out-dir", synth_opt.out_dir, "Output directory")->required();
  synth_cmd->add_option("--versions", s.num_versions, "Number of versions")->capture_default_str();
  synth_cmd->add_option("--length", s.base_length, "Base timeline length in frames")
      ->capture_default_str();
  synth_cmd->add_option("--warp", s.warp_strength, "Local tempo range w in [0, 1]")
      ->capture_default_str();
  synth_cmd->add_option("--noise", s.noise_level, "Additive noise level")->capture_default_str();
  synth_cmd->add_option("--articulation", s.articulation_perturbation,
                        "Per-version articulation perturbation")
      ->capture_default_str();
  synth_cmd->add_option("--silence", s.silence_rate, "Pause probability per note region")
      ->capture_default_str();
  synth_cmd->add_option("--beat-every", s.beat_every, "Base frames between beats")
      ->capture_default_str();
  synth_cmd->add_option("--hop", s.hop_duration, "Hop duration in seconds")->capture_default_str();
  synth_cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  synth_cmd->add_flag("--no-onsets", synth_opt.no_onsets, "Omit onset feature files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*pair_cmd) return run_align_pair(common, pair_opt);
    if (*multi_cmd) return run_align_multi(common, multi_opt);
    if (*eval_cmd) return run_evaluate(common, eval_opt);
    if (*synth_cmd) return run_synth(synth_opt);
  } catch (const std::exception& e) {
    std::cerr << "mvsync: error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
