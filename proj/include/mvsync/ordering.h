#pragma once

/// @file ordering.h
/// @brief Order in which versions enter the progressive alignment.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mvsync/features.h"
#include "mvsync/multiscale.h"

namespace mvsync {

enum class OrderStrategy {
  kLengthAscending,
  kLengthDescending,
  kDtwCost,
  kAsGiven,
};

std::string to_string(OrderStrategy strategy);
OrderStrategy parse_order_strategy(const std::string& text);

using SquareMatrix = std::vector<std::vector<double>>;

struct OrderPlan {
  std::vector<std::size_t> permutation;
  OrderStrategy strategy = OrderStrategy::kAsGiven;
  /// Symmetric average-cost matrix; only filled for kDtwCost.
  std::optional<SquareMatrix> pairwise_avg_costs;
};

/// Shortest first; equal lengths ordered by label, then by index.
/// `descending` returns the exact reverse of the ascending permutation.
OrderPlan length_order(const std::vector<FeatureSequence>& versions, bool descending = false);

OrderPlan given_order(std::size_t count);

/// Average cost of the optimal alignment for every unordered pair, mirrored.
SquareMatrix pairwise_average_costs(const std::vector<FeatureSequence>& versions,
                                    const CostConfig& cfg, const MultiscaleConfig& ms,
                                    std::size_t jobs = 1);

/// Greedy selection on a precomputed average-cost matrix: the cheapest pair first (lower
/// label first), then repeatedly the version with the smallest summed cost to all chosen
/// ones. Ties are resolved by label.
std::vector<std::size_t> greedy_cost_order(const SquareMatrix& avg_costs,
                                           const std::vector<std::string>& labels);

OrderPlan dtw_cost_order(const std::vector<FeatureSequence>& versions, const CostConfig& cfg,
                         const MultiscaleConfig& ms, std::size_t jobs = 1);

OrderPlan make_order(OrderStrategy strategy, const std::vector<FeatureSequence>& versions,
                     const CostConfig& cfg, const MultiscaleConfig& ms, std::size_t jobs = 1);

}  // namespace mvsync
