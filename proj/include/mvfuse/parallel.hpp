#pragma once

#include <cstddef>
#include <functional>

namespace mvfuse {

/// Worker count: MVFUSE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Callers must only
/// write to slots owned by index i, so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace mvfuse
