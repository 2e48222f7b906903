#pragma once

/// @file multiscale.h
/// @brief Coarse-to-fine DTW: align downsampled sequences, then refine inside a band
/// around the projected path.

#include <cstddef>
#include <functional>
#include <vector>

#include "mvsync/features.h"
#include "mvsync/pairwise.h"
#include "mvsync/template.h"

namespace mvsync {

/// Levels coarser than this many frames on either axis are skipped.
inline constexpr std::size_t kMinCoarseFrames = 10;

struct MultiscaleConfig {
  /// Coarse-to-fine downsampling factors. Must end in 1, each dividing its predecessor.
  std::vector<std::size_t> factors{8, 4, 2, 1};
  /// Column dilation of the projected path, in frames of the finer level.
  std::size_t band_radius = 25;
  bool enabled = false;

  void validate() const;
};

/// @brief Per-row admissible column interval [lo, hi] (inclusive, 0-based).
struct BandMask {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::size_t cols = 0;

  static BandMask full(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return lo.size(); }
  bool contains(std::size_t n, std::size_t m) const {
    return n < rows() && m >= lo[n] && m <= hi[n];
  }
  std::size_t cell_count() const;

  /// Throws unless corners are admissible and consecutive rows can be connected.
  void validate() const;
};

/// Averages consecutive groups of `factor` frames (a trailing partial group over its actual
/// size). Chroma is renormalized; onsets are averaged only. Hop grows by `factor`.
FeatureSequence downsample(const FeatureSequence& seq, std::size_t factor);

/// Row-wise version for templates: the non-gap cells of a row within one column group are
/// averaged into a single frame; a group with no such cell stays a gap.
Template downsample(const Template& z, std::size_t factor);

/// Maps each coarse cell to its fine block, clips to the fine grid, and widens every row's
/// interval by `radius` columns.
BandMask project_path(const AlignmentPath& coarse, std::size_t factor, std::size_t rows_fine,
                      std::size_t cols_fine, std::size_t radius);

using CellCost = std::function<double(std::size_t, std::size_t)>;

/// DTW restricted to `band`. Cells outside are +inf; costs are requested only for band cells.
/// Same boundary, weighting, and tie-breaking as the dense `dtw`.
AlignmentPath banded_dtw(const BandMask& band, const CellCost& cost, const StepWeights& weights,
                         std::size_t* evaluated_cells = nullptr);

struct MultiscaleStats {
  std::vector<std::size_t> level_factors;
  std::vector<std::size_t> evaluated_cells;
  BandMask finest_band;
};

AlignmentPath msdtw(const Template& z, const FeatureSequence& x, const CostConfig& cfg,
                    const MultiscaleConfig& ms, MultiscaleStats* stats = nullptr);

AlignmentPath msdtw(const FeatureSequence& x, const FeatureSequence& y, const CostConfig& cfg,
                    const MultiscaleConfig& ms, MultiscaleStats* stats = nullptr);

/// Full DTW when `ms.enabled` is false, multiscale otherwise.
AlignmentPath align_pair(const FeatureSequence& x, const FeatureSequence& y,
                         const CostConfig& cfg, const MultiscaleConfig& ms);

}  // namespace mvsync
