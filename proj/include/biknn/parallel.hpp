#pragma once

#include <cstddef>
#include <functional>

namespace biknn {

/// Worker count: hardware concurrency, capped by the BIKNN_THREADS
/// environment variable when it holds a positive integer.
std::size_t thread_count();

/// Calls body(i) for i in [0, n) across worker threads. Each index is visited
/// exactly once; callers write to per-index slots so output order never
/// depends on scheduling. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace biknn
