#include "mvsync/ordering.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mvsync/error.h"
#include "mvsync/pairwise.h"
#include "mvsync/parallel.h"

namespace mvsync {

std::string to_string(OrderStrategy strategy) {
  switch (strategy) {
    case OrderStrategy::kLengthAscending: return "length-ascending";
    case OrderStrategy::kLengthDescending: return "length-descending";
    case OrderStrategy::kDtwCost: return "dtw-cost";
    case OrderStrategy::kAsGiven: return "as-given";
  }
  return "unknown";
}

OrderStrategy parse_order_strategy(const std::string& text) {
  if (text == "length-ascending" || text == "length") return OrderStrategy::kLengthAscending;
  if (text == "length-descending") return OrderStrategy::kLengthDescending;
  if (text == "dtw-cost") return OrderStrategy::kDtwCost;
  if (text == "as-given" || text == "given") return OrderStrategy::kAsGiven;
  throw Error("unknown order strategy '" + text + "'");
}

namespace {

/// Position of each version when sorted by (label, index).
std::vector<std::size_t> label_ranks(const std::vector<std::string>& labels) {
  std::vector<std::size_t> by_label(labels.size());
  std::iota(by_label.begin(), by_label.end(), 0);
  std::stable_sort(by_label.begin(), by_label.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  std::vector<std::size_t> rank(labels.size());
  for (std::size_t r = 0; r < by_label.size(); ++r) rank[by_label[r]] = r;
  return rank;
}

std::vector<std::string> labels_of(const std::vector<FeatureSequence>& versions) {
  std::vector<std::string> labels;
  for (const auto& v : versions) labels.push_back(v.label);
  return labels;
}

}  // namespace

OrderPlan length_order(const std::vector<FeatureSequence>& versions, bool descending) {
  MVSYNC_CHECK(!versions.empty(), "length_order: no versions");
  const auto rank = label_ranks(labels_of(versions));
  OrderPlan plan;
  plan.strategy = descending ? OrderStrategy::kLengthDescending : OrderStrategy::kLengthAscending;
  plan.permutation.resize(versions.size());
  std::iota(plan.permutation.begin(), plan.permutation.end(), 0);
  std::sort(plan.permutation.begin(), plan.permutation.end(), [&](std::size_t a, std::size_t b) {
    if (versions[a].size() != versions[b].size()) return versions[a].size() < versions[b].size();
    return rank[a] < rank[b];
  });
  if (descending) std::reverse(plan.permutation.begin(), plan.permutation.end());
  return plan;
}

OrderPlan given_order(std::size_t count) {
  OrderPlan plan;
  plan.strategy = OrderStrategy::kAsGiven;
  plan.permutation.resize(count);
  std::iota(plan.permutation.begin(), plan.permutation.end(), 0);
  return plan;
}

SquareMatrix pairwise_average_costs(const std::vector<FeatureSequence>& versions,
                                    const CostConfig& cfg, const MultiscaleConfig& ms,
                                    std::size_t jobs) {
  const std::size_t k = versions.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);

  std::vector<double> costs(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    costs[p] = average_cost(align_pair(versions[i], versions[j], cfg, ms));
  });

  SquareMatrix matrix(k, std::vector<double>(k, 0.0));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    matrix[i][j] = matrix[j][i] = costs[p];
  }
  return matrix;
}

std::vector<std::size_t> greedy_cost_order(const SquareMatrix& avg_costs,
                                           const std::vector<std::string>& labels) {
  const std::size_t k = labels.size();
  MVSYNC_CHECK(k >= 2 && avg_costs.size() == k, "greedy_cost_order: need a K x K matrix, K >= 2");
  const auto rank = label_ranks(labels);

  // Seed pair: lowest average cost, ties by the pair's label ranks.
  std::size_t best_a = 0;
  std::size_t best_b = 0;
  double best = std::numeric_limits<double>::infinity();
  auto key = [&](std::size_t a, std::size_t b) {
    return std::make_pair(std::min(rank[a], rank[b]), std::max(rank[a], rank[b]));
  };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double c = avg_costs[i][j];
      if (c < best || (c == best && key(i, j) < key(best_a, best_b))) {
        best = c;
        best_a = i;
        best_b = j;
      }
    }
  }
  if (rank[best_b] < rank[best_a]) std::swap(best_a, best_b);

  std::vector<std::size_t> order{best_a, best_b};
  std::vector<bool> chosen(k, false);
  chosen[best_a] = chosen[best_b] = true;
  while (order.size() < k) {
    std::size_t pick = k;
    double pick_sum = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (chosen[c]) continue;
      double sum = 0.0;
      for (std::size_t s : order) sum += avg_costs[c][s];
      if (pick == k || sum < pick_sum || (sum == pick_sum && rank[c] < rank[pick])) {
        pick = c;
        pick_sum = sum;
      }
    }
    chosen[pick] = true;
    order.push_back(pick);
  }
  return order;
}

OrderPlan dtw_cost_order(const std::vector<FeatureSequence>& versions, const CostConfig& cfg,
                         const MultiscaleConfig& ms, std::size_t jobs) {
  MVSYNC_CHECK(versions.size() >= 2, "dtw_cost_order needs at least two versions");
  OrderPlan plan;
  plan.strategy = OrderStrategy::kDtwCost;
  plan.pairwise_avg_costs = pairwise_average_costs(versions, cfg, ms, jobs);
  plan.permutation = greedy_cost_order(*plan.pairwise_avg_costs, labels_of(versions));
  return plan;
}

OrderPlan make_order(OrderStrategy strategy, const std::vector<FeatureSequence>& versions,
                     const CostConfig& cfg, const MultiscaleConfig& ms, std::size_t jobs) {
  switch (strategy) {
    case OrderStrategy::kLengthAscending: return length_order(versions, false);
    case OrderStrategy::kLengthDescending: return length_order(versions, true);
    case OrderStrategy::kDtwCost: return dtw_cost_order(versions, cfg, ms, jobs);
    case OrderStrategy::kAsGiven: return given_order(versions.size());
  }
  throw Error("unknown order strategy");
}

}  // namespace mvsync
