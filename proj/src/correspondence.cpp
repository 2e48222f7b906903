#include "mvsync/correspondence.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvsync/error.h"

namespace mvsync {

Correspondence::Correspondence(std::vector<IndexPair> pairs, std::size_t source_length,
                               std::size_t target_length)
    : pairs_(std::move(pairs)), source_length_(source_length), target_length_(target_length) {
  MVSYNC_CHECK(!pairs_.empty(), "correspondence has no matched frames");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    MVSYNC_CHECK(pairs_[i].n < source_length_ && pairs_[i].m < target_length_,
                 "correspondence pair out of range");
    if (i > 0) {
      MVSYNC_CHECK(pairs_[i].n >= pairs_[i - 1].n && pairs_[i].m >= pairs_[i - 1].m,
                   "correspondence pairs are not monotone");
    }
  }
}

Correspondence Correspondence::from_path(const AlignmentPath& path) {
  return Correspondence(path.pairs, path.rows(), path.cols());
}

std::size_t Correspondence::map(std::size_t source_frame) const {
  MVSYNC_CHECK(source_frame < source_length_,
               "frame " + std::to_string(source_frame) + " outside source range");
  const auto first = std::lower_bound(
      pairs_.begin(), pairs_.end(), source_frame,
      [](const IndexPair& p, std::size_t v) { return p.n < v; });
  const auto last = std::upper_bound(
      first, pairs_.end(), source_frame,
      [](std::size_t v, const IndexPair& p) { return v < p.n; });
  if (first != last) return (first + (last - first - 1) / 2)->m;

  if (first == pairs_.begin()) return pairs_.front().m;
  if (first == pairs_.end()) return pairs_.back().m;

  const IndexPair& lo = *(first - 1);
  const IndexPair& hi = *first;
  const double t = static_cast<double>(source_frame - lo.n) / static_cast<double>(hi.n - lo.n);
  const double target = static_cast<double>(lo.m) + t * static_cast<double>(hi.m - lo.m);
  return static_cast<std::size_t>(std::floor(target + 0.5));
}

Correspondence Correspondence::inverted() const {
  std::vector<IndexPair> swapped;
  swapped.reserve(pairs_.size());
  for (const auto& p : pairs_) swapped.push_back({p.m, p.n});
  return Correspondence(std::move(swapped), target_length_, source_length_);
}

}  // namespace mvsync
