#pragma once

#include <cstddef>
#include <functional>

namespace mata {

/// Worker cap: the MATA_THREADS environment variable if set to a positive
/// integer, otherwise the hardware concurrency.
int worker_count();

/// Runs fn(0) .. fn(n-1) on up to worker_count() threads. Callers write
/// results by index, so output order never depends on scheduling. Calls made
/// from inside a worker run serially. If any call throws, the exception from
/// the lowest index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mata
