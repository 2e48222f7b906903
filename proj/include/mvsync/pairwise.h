#pragma once

/// @file pairwise.h
/// @brief Weighted DTW between two sequences.
///
/// Indices are 0-based in memory. Files written by this module use 1-based indices.

#include <cstddef>
#include <filesystem>
#include <vector>

#include "mvsync/features.h"

namespace mvsync {

struct IndexPair {
  std::size_t n = 0;
  std::size_t m = 0;

  bool operator==(const IndexPair& other) const = default;
};

/// @brief Monotone boundary-to-boundary warping path with its accumulated cost.
struct AlignmentPath {
  std::vector<IndexPair> pairs;
  double total_cost = 0.0;

  std::size_t length() const { return pairs.size(); }
  std::size_t rows() const { return pairs.empty() ? 0 : pairs.back().n + 1; }
  std::size_t cols() const { return pairs.empty() ? 0 : pairs.back().m + 1; }
};

/// Checks boundary and step-size conditions against an N x M grid. Throws on violation.
void validate_path(const AlignmentPath& path, std::size_t rows, std::size_t cols);

/// @brief Dense N x M matrix of non-negative local costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t n, std::size_t m) const { return data_[n * cols_ + m]; }
  double& operator()(std::size_t n, std::size_t m) { return data_[n * cols_ + m]; }

  CostMatrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// C(n, m) = local cost between X[n] and Y[m] under `cfg.measure`.
CostMatrix cost_matrix(const FeatureSequence& x, const FeatureSequence& y, const CostConfig& cfg);

/// Optimal warping path by full dynamic programming.
///
/// Boundary: D(0,0) = C(0,0), D(n,0) = sum_{k<=n} w_v C(k,0), D(0,m) = sum_{k<=m} w_h C(0,k).
/// Interior cells take the minimum over the three predecessors; ties prefer the diagonal,
/// then (1,0), then (0,1). total_cost = D(N-1, M-1).
AlignmentPath dtw(const CostMatrix& cost, const StepWeights& weights);

/// total_cost / length.
double average_cost(const AlignmentPath& path);

/// Lower median of all columns matched to row `n`.
std::size_t map_position(const AlignmentPath& path, std::size_t n);

/// Writes `n,m` lines (1-based) followed by `# total_cost=<value>`.
void write_path_csv(const std::filesystem::path& file, const AlignmentPath& path);
AlignmentPath read_path_csv(const std::filesystem::path& file);

}  // namespace mvsync
