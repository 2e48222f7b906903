#pragma once

/// @file correspondence.h
/// @brief Frame-to-frame mapping between two versions, used to transfer beat positions.

#include <cstddef>
#include <vector>

#include "mvsync/pairwise.h"

namespace mvsync {

/// @brief Monotone list of matched (source, target) frame pairs.
///
/// `map` resolves any source frame: matched frames take the lower median of their targets,
/// unmatched frames are linearly interpolated between the neighbouring pairs (rounded half
/// up) and clamped to the first/last pair outside the matched range.
class Correspondence {
 public:
  Correspondence(std::vector<IndexPair> pairs, std::size_t source_length,
                 std::size_t target_length);

  /// Every pair of a warping path.
  static Correspondence from_path(const AlignmentPath& path);

  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t source_length() const { return source_length_; }
  std::size_t target_length() const { return target_length_; }

  std::size_t map(std::size_t source_frame) const;

  /// Swaps source and target.
  Correspondence inverted() const;

 private:
  std::vector<IndexPair> pairs_;
  std::size_t source_length_;
  std::size_t target_length_;
};

}  // namespace mvsync
