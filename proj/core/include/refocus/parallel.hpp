#pragma once

#include <cstddef>
#include <functional>

namespace refocus {

// Run fn(i) for i in [0, n) across worker threads. Results must be written to
// preallocated per-index slots so the outcome is schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t min_per_thread = 1);

}
