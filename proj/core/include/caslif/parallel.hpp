#pragma once

#include <cstddef>
#include <functional>

namespace caslif {

// Run fn(i) for i in [0, n) on up to n_threads workers (0 = hardware
// concurrency). Each index is processed exactly once; callers write into
// preallocated slots, so results are independent of scheduling.
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace caslif
