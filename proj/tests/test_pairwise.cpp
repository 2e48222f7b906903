#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "mvsync/correspondence.h"
#include "mvsync/error.h"
#include "mvsync/pairwise.h"
#include "oracles.h"

using namespace mvsync;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::vector<IndexPair> diagonal(std::size_t n) {
  std::vector<IndexPair> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({i, i});
  return p;
}

FeatureSequence constant_sequence(std::size_t frames, std::size_t pc) {
  FeatureSequence seq;
  seq.chroma = FrameMatrix(frames, kChromaDim, 0.0);
  for (std::size_t i = 0; i < frames; ++i) seq.chroma[i][pc] = 1.0;
  return seq;
}

/// Random valid path on an n x m grid.
AlignmentPath random_path(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  AlignmentPath p;
  std::size_t i = 0;
  std::size_t j = 0;
  p.pairs.push_back({0, 0});
  std::uniform_int_distribution<int> step(0, 2);
  while (i + 1 < n || j + 1 < m) {
    int s = step(rng);
    if (i + 1 == n) s = 2;
    if (j + 1 == m) s = 1;
    if (s == 0) ++i, ++j;
    if (s == 1) ++i;
    if (s == 2) ++j;
    p.pairs.push_back({i, j});
  }
  return p;
}

}  // namespace

TEST_CASE("cost matrix entries") {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_sequence(3, rng);
  const auto c = cost_matrix(x, x, CostConfig{});
  for (std::size_t i = 0; i < 3; ++i) CHECK(c(i, i) == 0.0);

  const auto a = constant_sequence(4, 0);
  const auto b = constant_sequence(5, 1);
  const auto ortho = cost_matrix(a, b, CostConfig{});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(ortho(i, j) == 1.0);

  const auto p = oracle::random_sequence(9, rng);
  const auto q = oracle::random_sequence(7, rng);
  const auto pq = cost_matrix(p, q, CostConfig{});
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(pq(i, j) == Approx(1.0 - oracle::dot(p.chroma[i], q.chroma[j])).margin(1e-12));

  CostConfig combined = default_cost_config(CostMeasure::kChromaCosineOnsetEuclidean);
  CHECK_THROWS_AS(cost_matrix(p, q, combined), Error);
}

TEST_CASE("dtw on hand-made matrices") {
  CostMatrix zeros(4, 6, 0.0);
  const auto z = dtw(zeros, StepWeights{});
  CHECK(z.total_cost == 0.0);
  CHECK_NOTHROW(validate_path(z, 4, 6));

  CostMatrix id(3, 3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 0.0;
  const auto p = dtw(id, StepWeights{2.0, 1.0, 1.0});
  CHECK(p.pairs == diagonal(3));
  CHECK(p.total_cost == 0.0);

  CostMatrix single(1, 1, 0.7);
  CHECK(dtw(single, StepWeights{}).total_cost == 0.7);
}

TEST_CASE("dtw matches brute-force enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> wd(0.1, 3.0);
  std::uniform_int_distribution<std::size_t> len(1, 7);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = t == 0 ? 6 : len(rng);
    const std::size_t m = t == 0 ? 7 : len(rng);
    const auto g = oracle::random_grid(n, m, rng);
    const StepWeights w = t == 0 ? StepWeights{} : StepWeights{wd(rng), wd(rng), wd(rng)};
    const auto path = dtw(oracle::to_matrix(g), w);
    const oracle::Weights ow{w.diagonal, w.vertical, w.horizontal};
    CHECK(path.total_cost == Approx(oracle::brute_force_dtw(g, ow)).margin(1e-9));
    CHECK(path.total_cost == Approx(oracle::path_cost(g, path.pairs, ow)).margin(1e-9));
    CHECK_NOTHROW(validate_path(path, n, m));
    CHECK(average_cost(path) <= path.total_cost);
  }
}

TEST_CASE("dtw self-alignment is the zero-cost diagonal") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> wd(0.1, 3.0);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_sequence(5 + t * 3, rng);
    const auto path = dtw(cost_matrix(x, x, CostConfig{}), StepWeights{wd(rng), wd(rng), wd(rng)});
    CHECK(path.total_cost == 0.0);
    CHECK(path.pairs == diagonal(x.size()));
  }
}

TEST_CASE("dtw is invariant to weight scaling") {
  // D(1,1) = C(1,1) carries no weight, so scaling is exact when that cell costs nothing.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> wd(0.5, 2.0);
  for (int t = 0; t < 50; ++t) {
    auto g = oracle::random_grid(3 + t % 20, 4 + t % 17, rng);
    g[0][0] = 0.0;
    const auto c = oracle::to_matrix(g);
    const StepWeights w{wd(rng), wd(rng), wd(rng)};
    const double k = 4.0;  // power of two keeps every product exact
    const auto a = dtw(c, w);
    const auto b = dtw(c, StepWeights{k * w.diagonal, k * w.vertical, k * w.horizontal});
    CHECK(a.pairs == b.pairs);
    CHECK(b.total_cost == Approx(k * a.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("dtw transpose symmetry") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> wd(0.5, 2.0);
  for (int t = 0; t < 50; ++t) {
    const auto c = oracle::to_matrix(oracle::random_grid(2 + t % 13, 3 + t % 11, rng));
    const StepWeights w{wd(rng), wd(rng), wd(rng)};
    const auto a = dtw(c, w);
    const auto b = dtw(c.transposed(), StepWeights{w.diagonal, w.horizontal, w.vertical});
    CHECK(b.total_cost == Approx(a.total_cost).margin(1e-9));
    REQUIRE(a.length() == b.length());
    for (std::size_t l = 0; l < a.length(); ++l) {
      CHECK(a.pairs[l].n == b.pairs[l].m);
      CHECK(a.pairs[l].m == b.pairs[l].n);
    }
  }
}

TEST_CASE("average cost") {
  AlignmentPath p;
  p.pairs = diagonal(4);
  p.total_cost = 10.0;
  CHECK(average_cost(p) == 2.5);
  p.total_cost = 0.0;
  CHECK(average_cost(p) == 0.0);
}

TEST_CASE("path validation rejects malformed paths") {
  AlignmentPath p;
  p.pairs = {{0, 0}, {2, 1}};
  CHECK_THROWS_AS(validate_path(p, 3, 2), Error);
  p.pairs = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(validate_path(p, 2, 2), Error);
  p.pairs = {{0, 0}, {1, 1}};
  CHECK_THROWS_AS(validate_path(p, 3, 2), Error);
  p.pairs.clear();
  CHECK_THROWS_AS(validate_path(p, 1, 1), Error);
}

TEST_CASE("map_position takes the lower median") {
  AlignmentPath diag;
  diag.pairs = diagonal(6);
  for (std::size_t n = 0; n < 6; ++n) CHECK(map_position(diag, n) == n);

  AlignmentPath run;
  run.pairs = {{0, 0}, {1, 1}, {1, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 6}};
  CHECK(map_position(run, 2) == 4);  // (3,4),(3,5),(3,6) in 1-based terms -> 5
  CHECK(map_position(run, 1) == 1);  // even count: lower median
  CHECK_THROWS_AS(map_position(run, 4), Error);

  std::mt19937_64 rng(29);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_path(1 + t % 15, 1 + (t * 7) % 19, rng);
    std::size_t prev = 0;
    for (std::size_t n = 0; n < p.rows(); ++n) {
      std::size_t lo = SIZE_MAX;
      std::size_t hi = 0;
      for (const auto& q : p.pairs)
        if (q.n == n) lo = std::min(lo, q.m), hi = std::max(hi, q.m);
      const std::size_t got = map_position(p, n);
      CHECK(got >= lo);
      CHECK(got <= hi);
      CHECK(got >= prev);
      prev = got;
    }
  }
}

TEST_CASE("alignment CSV round trip") {
  const fs::path dir = fs::temp_directory_path() / "mvsync_test_path";
  fs::create_directories(dir);
  std::mt19937_64 rng(31);
  const auto c = oracle::to_matrix(oracle::random_grid(12, 9, rng));
  const auto p = dtw(c, StepWeights{});
  write_path_csv(dir / "p.csv", p);
  const auto back = read_path_csv(dir / "p.csv");
  CHECK(back.pairs == p.pairs);
  CHECK(back.total_cost == p.total_cost);
  CHECK_NOTHROW(validate_path(back, 12, 9));

  std::ifstream in(dir / "p.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "1,1");

  std::ofstream(dir / "bad.csv") << "1,1\n3,2\n";
  CHECK_THROWS_AS(read_path_csv(dir / "bad.csv"), Error);
}

TEST_CASE("correspondence mapping and inversion") {
  const Correspondence c({{0, 0}, {2, 4}, {5, 6}}, 8, 7);
  CHECK(c.map(0) == 0);
  CHECK(c.map(1) == 2);  // halfway between 0 and 4
  CHECK(c.map(2) == 4);
  CHECK(c.map(3) == 5);  // 4 + 2/3 rounds to 5
  CHECK(c.map(4) == 5);  // 4 + 4/3 = 5.33
  CHECK(c.map(5) == 6);
  CHECK(c.map(7) == 6);  // clamped past the last pair

  const Correspondence run({{0, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 4}}, 3, 5);
  CHECK(run.map(1) == 2);

  const auto inv = c.inverted();
  CHECK(inv.source_length() == 7);
  CHECK(inv.target_length() == 8);
  CHECK(inv.map(4) == 2);

  CHECK_THROWS_AS(Correspondence({{1, 2}, {0, 3}}, 4, 4), Error);
  CHECK_THROWS_AS(Correspondence({{0, 9}}, 4, 4), Error);
  CHECK_THROWS_AS(Correspondence({}, 4, 4), Error);
}
