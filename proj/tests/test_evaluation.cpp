#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "mvsync/error.h"
#include "mvsync/evaluation.h"
#include "mvsync/synthetic.h"
#include "oracles.h"

using namespace mvsync;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

Correspondence identity(std::size_t n) {
  std::vector<IndexPair> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({i, i});
  return Correspondence(p, n, n);
}

Corpus corpus_from(const SyntheticCorpus& s) {
  Corpus c;
  c.versions = s.versions;
  for (std::size_t v = 0; v < s.versions.size(); ++v)
    c.beats.push_back({s.beat_times[v], s.versions[v].label});
  return c;
}

}  // namespace

TEST_CASE("beat to frame rounding") {
  CHECK(beat_to_frame(0.0, 0.02, 10) == 0);   // clamped to the first frame
  CHECK(beat_to_frame(0.02, 0.02, 10) == 0);
  CHECK(beat_to_frame(0.029, 0.02, 10) == 0);
  CHECK(beat_to_frame(0.03, 0.02, 10) == 1);  // 1.5 rounds away from zero
  CHECK(beat_to_frame(5.0, 0.02, 10) == 9);   // clamped to the last frame
  CHECK(frame_to_seconds(0, 0.02) == Approx(0.02));
}

TEST_CASE("identity correspondence stays within half a hop") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.9);
  std::vector<double> times;
  for (int i = 0; i < 50; ++i) times.push_back(u(rng));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double& t : times) t += 0.02;
  const BeatAnnotation b{times, "a"};
  const double v = abd(identity(200), b, b, 0.02);
  CHECK(v >= 0.0);
  CHECK(v <= 10.0 + 1e-9);
}

TEST_CASE("exact linear warp stays within one hop") {
  const double hop = 0.02;
  const std::size_t n = 100;
  const std::size_t m = 2 * n - 1;
  std::vector<IndexPair> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({i, 2 * i});
  const Correspondence c(p, n, m);
  std::vector<double> ta;
  std::vector<double> tb;
  for (std::size_t k = 0; k < 20; ++k) {
    const double base = 2.5 + 4.7 * static_cast<double>(k);  // fractional frame in version a
    ta.push_back((base + 1.0) * hop);
    tb.push_back((2.0 * base + 1.0) * hop);
  }
  const BeatAnnotation a{ta, "a"};
  const BeatAnnotation b{tb, "b"};
  CHECK(abd(c, a, b, hop) <= 20.0 + 1e-9);
  CHECK(abd(c.inverted(), b, a, hop) <= 20.0 + 1e-9);
}

TEST_CASE("ground-truth correspondences on synthetic pairs") {
  SyntheticCorpusSpec spec;
  spec.base_length = 300;
  spec.num_versions = 4;
  spec.warp_strength = 0.6;
  spec.beat_every = 7;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto s = generate_synthetic_corpus(spec);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        const double v = abd(ground_truth_correspondence(s, i, j), {s.beat_times[i], "i"},
                             {s.beat_times[j], "j"}, spec.hop_duration);
        CHECK(v <= 20.0 + 1e-9);
      }
  }
}

TEST_CASE("abd preconditions") {
  const BeatAnnotation a{{0.1, 0.2}, "a"};
  const BeatAnnotation b{{0.1}, "b"};
  CHECK_THROWS_AS(abd(identity(20), a, b, 0.02), Error);
  CHECK_THROWS_AS(BeatAnnotation({}, "x").validate(), Error);
  CHECK_THROWS_AS(BeatAnnotation({0.2, 0.1}, "x").validate(), Error);
  CHECK_THROWS_AS(BeatAnnotation({-0.1, 0.1}, "x").validate(), Error);
}

TEST_CASE("pair abd averages both directions") {
  const Correspondence c({{0, 0}, {4, 8}, {9, 9}}, 10, 10);
  const BeatAnnotation a{{0.04, 0.1, 0.16}, "a"};
  const BeatAnnotation b{{0.04, 0.12, 0.19}, "b"};
  const auto p = pair_abd(c, a, b, 0.02);
  CHECK(p.forward == Approx(abd(c, a, b, 0.02)));
  CHECK(p.backward == Approx(abd(c.inverted(), b, a, 0.02)));
  CHECK(p.value == Approx(0.5 * (p.forward + p.backward)));
  CHECK(p.label_a == "a");
}

TEST_CASE("corpus statistics") {
  const std::vector<double> one{7.5};
  const auto s1 = corpus_stats(one);
  CHECK(s1.min == 7.5);
  CHECK(s1.mean == 7.5);
  CHECK(s1.max == 7.5);
  CHECK(s1.std == 0.0);

  const std::vector<double> three{10, 20, 30};
  const auto s3 = corpus_stats(three);
  CHECK(s3.mean == Approx(20.0));
  CHECK(s3.std == Approx(std::sqrt(200.0 / 3.0)));
  CHECK_THROWS_AS(corpus_stats(std::vector<double>{}), Error);

  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> ln(3.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v;
    for (int i = 0; i < 1 + t * 3; ++i) v.push_back(ln(rng));
    const auto box = boxplot(v);
    const double p25 = oracle::percentile(v, 25);
    const double p75 = oracle::percentile(v, 75);
    CHECK(box.median == Approx(oracle::percentile(v, 50)).margin(1e-9));
    CHECK(box.p25 == Approx(p25).margin(1e-9));
    CHECK(box.p75 == Approx(p75).margin(1e-9));
    CHECK(box.whisker_low == Approx(p25 - 1.5 * (p75 - p25)).margin(1e-9));
    CHECK(box.whisker_high == Approx(p75 + 1.5 * (p75 - p25)).margin(1e-9));
    CHECK(box.whisker_low <= box.p25);
    CHECK(box.whisker_high >= box.p75);
    for (double o : box.outliers) CHECK((o < box.whisker_low || o > box.whisker_high));
    const auto s = corpus_stats(v);
    CHECK(s.min <= s.mean);
    CHECK(s.mean <= s.max);
    CHECK(s.std >= 0.0);
  }
}

TEST_CASE("variant parsing") {
  CHECK(parse_variants("A,B,G") == std::vector<Variant>{Variant::kA, Variant::kB, Variant::kG});
  CHECK(variant_letter(Variant::kE) == 'E');
  CHECK_THROWS_AS(parse_variants("A,H"), Error);
}

TEST_CASE("variant configurations") {
  SyntheticCorpusSpec spec;
  spec.base_length = 60;
  spec.num_versions = 3;
  const auto corpus = corpus_from(generate_synthetic_corpus(spec));
  ExperimentOptions opt;
  CHECK(variant_cost_config(Variant::kA, corpus, opt).measure ==
        CostMeasure::kChromaCosineOnsetEuclidean);
  CHECK(variant_cost_config(Variant::kF, corpus, opt).measure == CostMeasure::kChromaCosine);
  CHECK(variant_cost_config(Variant::kF, corpus, opt).gap_penalty == 1.0);
  CHECK(variant_cost_config(Variant::kC, corpus, opt).gap_mode == GapMode::kCopyFeatures);
  opt.gap_penalty = 0.5;
  CHECK(variant_cost_config(Variant::kB, corpus, opt).gap_penalty == 0.5);

  auto no_onsets = corpus;
  no_onsets.versions[1].onset.reset();
  CHECK(variant_cost_config(Variant::kB, no_onsets, ExperimentOptions{}).measure ==
        CostMeasure::kChromaCosine);
}

TEST_CASE("experiment matrix structure") {
  SyntheticCorpusSpec spec;
  spec.base_length = 80;
  spec.num_versions = 4;
  spec.warp_strength = 0.3;
  const auto corpus = corpus_from(generate_synthetic_corpus(spec));
  ExperimentOptions opt;
  opt.variants = parse_variants("A,B,C,D,E,F,G");
  const auto report = run_experiment_matrix(corpus, opt);
  REQUIRE(report.variants.size() == 7);
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& p : report.variants[0].per_pair) keys.insert({p.label_a, p.label_b});
  CHECK(keys.size() == 6);
  for (const auto& v : report.variants) {
    std::set<std::pair<std::string, std::string>> k;
    std::vector<double> values;
    for (const auto& p : v.per_pair) {
      k.insert({p.label_a, p.label_b});
      values.push_back(p.value);
      CHECK(std::isfinite(p.value));
      CHECK(p.value >= 0.0);
    }
    CHECK(k == keys);
    const auto s = corpus_stats(values);
    CHECK(s.mean == v.stats.mean);
    CHECK(s.std == v.stats.std);
  }
  CHECK(report.variants[3].order->pairwise_avg_costs.has_value());
  CHECK(report.variants[4].steps.size() == 3 + 4);

  const auto doc = to_json(report);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["variants"]["B"]["per_pair"].size() == 6);
  CHECK(doc.contains("run_info"));
}

TEST_CASE("single pair corpus collapses the statistics") {
  SyntheticCorpusSpec spec;
  spec.base_length = 50;
  spec.num_versions = 2;
  const auto corpus = corpus_from(generate_synthetic_corpus(spec));
  ExperimentOptions opt;
  opt.variants = {Variant::kA};
  const auto report = run_experiment_matrix(corpus, opt);
  const auto& v = report.variants[0];
  REQUIRE(v.per_pair.size() == 1);
  CHECK(v.stats.min == v.per_pair[0].value);
  CHECK(v.stats.mean == v.per_pair[0].value);
  CHECK(v.stats.max == v.per_pair[0].value);
  CHECK(v.stats.std == 0.0);
}

TEST_CASE("corpus loading reports unmatched labels") {
  const fs::path dir = fs::temp_directory_path() / "mvsync_test_corpus";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SyntheticCorpusSpec spec;
  spec.base_length = 40;
  spec.num_versions = 3;
  const auto s = generate_synthetic_corpus(spec);
  for (std::size_t v = 0; v < 3; ++v) {
    save_feature_sequence(s.versions[v], dir);
    if (v != 1) save_beat_annotation({s.beat_times[v], s.versions[v].label}, dir / (s.versions[v].label + ".beats.csv"));
  }
  save_beat_annotation({{0.1}, "zz"}, dir / "zz.beats.csv");
  try {
    load_corpus(dir);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("v01") != std::string::npos);
    CHECK(what.find("zz") != std::string::npos);
  }
  fs::remove(dir / "zz.beats.csv");
  save_beat_annotation({s.beat_times[1], "v01"}, dir / "v01.beats.csv");
  const auto corpus = load_corpus(dir);
  CHECK(corpus.versions.size() == 3);
  CHECK(corpus.versions[0].has_onsets());
}

TEST_CASE("abd CSV agrees with the report") {
  SyntheticCorpusSpec spec;
  spec.base_length = 60;
  spec.num_versions = 3;
  const auto corpus = corpus_from(generate_synthetic_corpus(spec));
  ExperimentOptions opt;
  const auto report = run_experiment_matrix(corpus, opt);
  const fs::path path = fs::temp_directory_path() / "mvsync_test_abd.csv";
  write_abd_csv(report, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "variant,label_a,label_b,abd_ms,abd_forward_ms,abd_backward_ms");
  std::vector<double> b_values;
  while (std::getline(in, line)) {
    if (line[0] != 'B') continue;
    const auto c3 = line.find(',', line.find(',', 2) + 1);
    b_values.push_back(std::stod(line.substr(c3 + 1)));
  }
  const auto s = corpus_stats(b_values);
  CHECK(s.mean == report.variants[1].stats.mean);
  CHECK(s.max == report.variants[1].stats.max);
}
