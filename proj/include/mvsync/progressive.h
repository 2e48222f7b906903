#pragma once

/// @file progressive.h
/// @brief Progressive joint alignment of several versions through a growing template.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mvsync/features.h"
#include "mvsync/multiscale.h"
#include "mvsync/pairwise.h"
#include "mvsync/template.h"

namespace mvsync {

/// One alignment of a version against the template.
struct AlignmentStep {
  std::size_t iteration = 1;
  std::string label;
  double total_cost = 0.0;
  double average_cost = 0.0;
  std::size_t path_length = 0;
  std::size_t template_length = 0;  ///< After extension.
  /// Average cost of this version's previous alignment (realignments only), NaN otherwise.
  double previous_average_cost = std::numeric_limits<double>::quiet_NaN();
};

/// DTW between template columns and the frames of `x`, with template_cost as local cost.
AlignmentPath align_to_template(const Template& z, const FeatureSequence& x, const CostConfig& cfg,
                                const MultiscaleConfig& ms);

/// Starts from `versions[order[0]]` and successively aligns and appends the rest.
Template progressive_align(const std::vector<FeatureSequence>& versions,
                           const std::vector<std::size_t>& order, const CostConfig& cfg,
                           const MultiscaleConfig& ms, std::vector<AlignmentStep>* log = nullptr);

/// progressive_align, then `iterations - 1` passes that remove each version (in the original
/// order) and realign it. Realigned rows are appended at the end of the template.
Template iterative_align(const std::vector<FeatureSequence>& versions,
                         const std::vector<std::size_t>& order, std::size_t iterations,
                         const CostConfig& cfg, const MultiscaleConfig& ms,
                         std::vector<AlignmentStep>* log = nullptr);

/// Throws unless `order` is a permutation of 0..count-1.
void check_permutation(const std::vector<std::size_t>& order, std::size_t count);

}  // namespace mvsync
