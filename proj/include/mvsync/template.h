#pragma once

/// @file template.h
/// @brief The multi-version template: k aligned rows of frames or gap symbols.
///
/// Each cell stores an index into the row's original sequence, or `Template::kGap`.
/// The gap mask is the source of truth; the all-(-1) pseudo-frame only appears when a
/// template is serialized.

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mvsync/correspondence.h"
#include "mvsync/features.h"
#include "mvsync/pairwise.h"

namespace mvsync {

class Template {
 public:
  static constexpr std::size_t kGap = std::numeric_limits<std::size_t>::max();
  static constexpr double kGapValue = -1.0;

  /// `cells` is column-major: cell (col, row) lives at `col * versions.size() + row`.
  /// Throws if dimensions are inconsistent, an index is out of range, a row is not
  /// monotone, or a column holds only gaps.
  Template(std::vector<std::shared_ptr<const FeatureSequence>> versions,
           std::vector<std::size_t> cells);

  std::size_t length() const { return versions_.empty() ? 0 : cells_.size() / versions_.size(); }
  std::size_t rows() const { return versions_.size(); }

  const FeatureSequence& version(std::size_t row) const { return *versions_[row]; }
  const std::shared_ptr<const FeatureSequence>& version_ptr(std::size_t row) const {
    return versions_[row];
  }
  const std::string& label(std::size_t row) const { return versions_[row]->label; }
  std::vector<std::string> labels() const;

  std::size_t entry(std::size_t col, std::size_t row) const {
    return cells_[col * rows() + row];
  }
  bool is_gap(std::size_t col, std::size_t row) const { return entry(col, row) == kGap; }
  FrameBundle bundle(std::size_t col, std::size_t row) const;

  std::size_t gap_count(std::size_t row) const;
  std::size_t gap_count() const;

  double hop_duration() const { return versions_.front()->hop_duration; }
  std::size_t chroma_dim() const { return versions_.front()->chroma.dim(); }
  bool has_onsets() const { return versions_.front()->has_onsets(); }
  std::size_t onset_dim() const {
    return has_onsets() ? versions_.front()->onset->dim() : 0;
  }

  const std::vector<std::size_t>& cells() const { return cells_; }

 private:
  std::vector<std::shared_ptr<const FeatureSequence>> versions_;
  std::vector<std::size_t> cells_;
};

/// Single-row template holding `x` with no gaps.
Template template_init(const FeatureSequence& x);

/// Sum over template rows of the local cost against `x`, charging `cfg.gap_penalty` per gap.
double template_cost(const Template& z, std::size_t col, const FrameBundle& x,
                     const CostConfig& cfg);

/// L x M matrix of template_cost values.
CostMatrix template_cost_matrix(const Template& z, const FeatureSequence& x,
                                const CostConfig& cfg);

/// Throws unless `x` can be compared against the template's rows under `measure`.
void check_compatible(const Template& z, const FeatureSequence& x, CostMeasure measure);

/// Stretches template and new sequence along `path` and appends `x` as the last row.
Template template_extend(const Template& z, const FeatureSequence& x, const AlignmentPath& path,
                         GapMode mode);

struct TemplateRemoval {
  Template remaining;
  FeatureSequence removed;
};

/// Deletes a row and every column that becomes all-gap. Needs at least two rows.
TemplateRemoval remove_from_template(const Template& z, std::size_t row);

/// Frames of `row` at its non-gap cells, in column order. Repeated cells (copy-features
/// templates) are kept.
FeatureSequence reconstruct_row(const Template& z, std::size_t row);

/// Frame pairs of rows i and j at the columns where both are non-gap.
Correspondence pairwise_from_template(const Template& z, std::size_t i, std::size_t j);

std::size_t find_row(const Template& z, const std::string& label);

/// CSV with one template column per line: for each row its chroma then onset values,
/// gaps written as -1. A JSON sidecar records labels, dimensions, hop, and gap runs.
void write_template(const Template& z, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path);

}  // namespace mvsync
