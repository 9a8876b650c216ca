#pragma once

#include <cstddef>
#include <functional>

namespace vemrcp {

/// Worker count: VEMRCP_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
int worker_count();

/// Calls body(i) for i in [0, count) over contiguous chunks. Each index must
/// write only to its own slot. On failure the exception from the lowest
/// failing chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace vemrcp
