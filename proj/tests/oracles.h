#pragma once

// Independent reference implementations used by the unit tests and the acceptance suite.
// Nothing here calls into the library's DTW, template cost, or statistics code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mvsync/features.h"
#include "mvsync/pairwise.h"
#include "mvsync/template.h"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

struct Weights {
  double diagonal;
  double vertical;
  double horizontal;
};

/// Minimum over every admissible path from (0,0) to (N-1,M-1) by exhaustive enumeration.
/// Each cell is weighted by the step that enters it; the first cell takes the weight of the
/// step that leaves it when that step is vertical or horizontal and 1 otherwise.
inline double brute_force_dtw(const Grid& c, Weights w) {
  const std::size_t n = c.size();
  const std::size_t m = c.front().size();
  double best = std::numeric_limits<double>::infinity();
  struct Walker {
    const Grid& c;
    Weights w;
    std::size_t n, m;
    double& best;
    void go(std::size_t i, std::size_t j, double acc) {
      if (i == n - 1 && j == m - 1) {
        best = std::min(best, acc);
        return;
      }
      if (i + 1 < n && j + 1 < m) go(i + 1, j + 1, acc + w.diagonal * c[i + 1][j + 1]);
      if (i + 1 < n) go(i + 1, j, acc + w.vertical * c[i + 1][j]);
      if (j + 1 < m) go(i, j + 1, acc + w.horizontal * c[i][j + 1]);
    }
  } walker{c, w, n, m, best};
  if (n == 1 && m == 1) return c[0][0];
  if (n > 1 && m > 1) walker.go(1, 1, c[0][0] + w.diagonal * c[1][1]);
  if (n > 1) walker.go(1, 0, w.vertical * c[0][0] + w.vertical * c[1][0]);
  if (m > 1) walker.go(0, 1, w.horizontal * c[0][0] + w.horizontal * c[0][1]);
  return best;
}

/// Cost of a given path under the same weighting convention as brute_force_dtw.
inline double path_cost(const Grid& c, const std::vector<mvsync::IndexPair>& pairs, Weights w) {
  if (pairs.size() == 1) return c[0][0];
  double acc = 0.0;
  for (std::size_t l = 1; l < pairs.size(); ++l) {
    const auto& a = pairs[l - 1];
    const auto& b = pairs[l];
    double weight = w.diagonal;
    double first = 1.0;
    if (b.n == a.n + 1 && b.m == a.m) weight = first = w.vertical;
    if (b.n == a.n && b.m == a.m + 1) weight = first = w.horizontal;
    if (l == 1) acc += first * c[0][0];
    acc += weight * c[b.n][b.m];
  }
  return acc;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double local(const mvsync::FeatureSequence& a, std::size_t i,
                    const mvsync::FeatureSequence& b, std::size_t j, mvsync::CostMeasure measure) {
  double c = std::max(0.0, 1.0 - dot(a.chroma[i], b.chroma[j]));
  if (measure == mvsync::CostMeasure::kChromaCosineOnsetEuclidean)
    c += euclid((*a.onset)[i], (*b.onset)[j]);
  return c;
}

/// Merged template-vs-sequence grid computed row by row from the template's cells.
inline Grid merged_grid(const mvsync::Template& z, const mvsync::FeatureSequence& x,
                        const mvsync::CostConfig& cfg) {
  Grid g(z.length(), std::vector<double>(x.size(), 0.0));
  for (std::size_t col = 0; col < z.length(); ++col) {
    for (std::size_t m = 0; m < x.size(); ++m) {
      double sum = 0.0;
      for (std::size_t r = 0; r < z.rows(); ++r) {
        const std::size_t e = z.cells()[col * z.rows() + r];
        sum += e == mvsync::Template::kGap ? cfg.gap_penalty
                                           : local(z.version(r), e, x, m, cfg.measure);
      }
      g[col][m] = sum;
    }
  }
  return g;
}

inline Grid random_grid(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid g(n, std::vector<double>(m));
  for (auto& row : g)
    for (double& v : row) v = u(rng);
  return g;
}

inline mvsync::CostMatrix to_matrix(const Grid& g) {
  mvsync::CostMatrix c(g.size(), g.front().size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j) c(i, j) = g[i][j];
  return c;
}

/// Random non-negative unit-norm chroma sequence, optionally with a random onset stream.
inline mvsync::FeatureSequence random_sequence(std::size_t frames, std::mt19937_64& rng,
                                               bool onsets = false, const std::string& label = "x",
                                               std::size_t onset_dim = 4) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mvsync::FeatureSequence seq;
  seq.label = label;
  seq.chroma = mvsync::FrameMatrix(frames, mvsync::kChromaDim);
  for (std::size_t i = 0; i < frames; ++i) {
    double norm = 0.0;
    for (std::size_t d = 0; d < mvsync::kChromaDim; ++d) {
      const double v = u(rng) * u(rng);
      seq.chroma[i][d] = v;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < mvsync::kChromaDim; ++d) seq.chroma[i][d] /= norm;
  }
  if (onsets) {
    mvsync::FrameMatrix o(frames, onset_dim);
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t d = 0; d < onset_dim; ++d) o[i][d] = u(rng) < 0.2 ? u(rng) : 0.0;
    seq.onset = std::move(o);
  }
  return seq;
}

/// Linear-interpolation percentile computed from a freshly sorted copy.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

/// Template invariants checked from the raw cells: every row reproduces its version's frames
/// in order (repeats allowed only when `allow_repeats`), and no column is all gaps.
inline std::string template_violation(const mvsync::Template& z, bool allow_repeats = false) {
  const std::size_t k = z.rows();
  for (std::size_t col = 0; col < z.length(); ++col) {
    bool any = false;
    for (std::size_t r = 0; r < k; ++r) any = any || z.cells()[col * k + r] != mvsync::Template::kGap;
    if (!any) return "all-gap column " + std::to_string(col);
  }
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<std::size_t> seen;
    for (std::size_t col = 0; col < z.length(); ++col) {
      const std::size_t e = z.cells()[col * k + r];
      if (e == mvsync::Template::kGap) continue;
      if (allow_repeats && !seen.empty() && seen.back() == e) continue;
      seen.push_back(e);
    }
    if (seen.size() != z.version(r).size()) return "row " + std::to_string(r) + " frame count";
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i] != i) return "row " + std::to_string(r) + " order";
  }
  return {};
}

inline std::size_t raw_gap_count(const mvsync::Template& z, std::size_t row) {
  std::size_t g = 0;
  for (std::size_t col = 0; col < z.length(); ++col)
    g += z.cells()[col * z.rows() + row] == mvsync::Template::kGap ? 1 : 0;
  return g;
}

}  // namespace oracle
