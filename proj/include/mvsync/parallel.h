#pragma once

#include <cstddef>
#include <functional>

namespace mvsync {

/// Number of workers to use for `jobs` (0 means all hardware threads).
std::size_t resolve_jobs(std::size_t jobs);

/// Runs fn(0) .. fn(count - 1) on up to `jobs` threads. Work items must write to disjoint
/// outputs. The first exception thrown by any item is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace mvsync
