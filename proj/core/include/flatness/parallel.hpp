#pragma once

#include <cstddef>
#include <functional>

namespace flatness {

/// Worker count from FLATNESS_THREADS, defaulting to the hardware concurrency.
std::size_t worker_count();

/// Runs body(k) for k in [0, count) on up to worker_count() threads. Callers
/// write results into per-index slots and reduce afterwards in index order,
/// so outcomes never depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers join.
/// Calls made from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace flatness
