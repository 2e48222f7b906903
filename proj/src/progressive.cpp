#include "mvsync/progressive.h"

#include <limits>
#include <set>

#include "mvsync/error.h"

namespace mvsync {

void check_permutation(const std::vector<std::size_t>& order, std::size_t count) {
  MVSYNC_CHECK(order.size() == count, "order has " + std::to_string(order.size()) +
                                          " entries for " + std::to_string(count) + " versions");
  std::vector<bool> seen(count, false);
  for (std::size_t i : order) {
    MVSYNC_CHECK(i < count && !seen[i], "order is not a permutation of the versions");
    seen[i] = true;
  }
}

AlignmentPath align_to_template(const Template& z, const FeatureSequence& x, const CostConfig& cfg,
                                const MultiscaleConfig& ms) {
  cfg.validate();
  check_compatible(z, x, cfg.measure);
  if (ms.enabled) return msdtw(z, x, cfg, ms);
  return dtw(template_cost_matrix(z, x, cfg), cfg.weights);
}

namespace {

AlignmentStep make_step(std::size_t iteration, const std::string& label, const AlignmentPath& path,
                        const Template& extended, double previous) {
  AlignmentStep step;
  step.iteration = iteration;
  step.label = label;
  step.total_cost = path.total_cost;
  step.average_cost = average_cost(path);
  step.path_length = path.length();
  step.template_length = extended.length();
  step.previous_average_cost = previous;
  return step;
}

}  // namespace

Template progressive_align(const std::vector<FeatureSequence>& versions,
                           const std::vector<std::size_t>& order, const CostConfig& cfg,
                           const MultiscaleConfig& ms, std::vector<AlignmentStep>* log) {
  MVSYNC_CHECK(versions.size() >= 2, "progressive alignment needs at least two versions");
  check_permutation(order, versions.size());
  std::set<std::string> labels;
  for (const auto& v : versions) {
    MVSYNC_CHECK(labels.insert(v.label).second, "duplicate version label '" + v.label + "'");
  }
  cfg.validate();

  constexpr double kNone = std::numeric_limits<double>::quiet_NaN();
  Template z = template_init(versions[order.front()]);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const FeatureSequence& x = versions[order[i]];
    const AlignmentPath path = align_to_template(z, x, cfg, ms);
    z = template_extend(z, x, path, cfg.gap_mode);
    if (log) log->push_back(make_step(1, x.label, path, z, kNone));
  }
  return z;
}

Template iterative_align(const std::vector<FeatureSequence>& versions,
                         const std::vector<std::size_t>& order, std::size_t iterations,
                         const CostConfig& cfg, const MultiscaleConfig& ms,
                         std::vector<AlignmentStep>* log) {
  MVSYNC_CHECK(iterations >= 1, "iterations must be at least 1");
  std::vector<AlignmentStep> steps;
  Template z = progressive_align(versions, order, cfg, ms, &steps);

  auto previous_cost = [&steps](const std::string& label) {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      if (it->label == label) return it->average_cost;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  for (std::size_t iter = 2; iter <= iterations; ++iter) {
    for (std::size_t idx : order) {
      const std::string& label = versions[idx].label;
      TemplateRemoval removal = remove_from_template(z, find_row(z, label));
      const AlignmentPath path = align_to_template(removal.remaining, removal.removed, cfg, ms);
      z = template_extend(removal.remaining, removal.removed, path, cfg.gap_mode);
      steps.push_back(make_step(iter, label, path, z, previous_cost(label)));
    }
  }
  if (log) log->insert(log->end(), steps.begin(), steps.end());
  return z;
}

}  // namespace mvsync
