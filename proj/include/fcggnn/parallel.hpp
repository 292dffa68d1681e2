#pragma once

#include <cstddef>
#include <functional>

namespace fcggnn {

/// Worker cap for parallel_for: FCG_NUM_WORKERS when set, otherwise the
/// available hardware threads.
int worker_count();

/// Runs fn(i) for i in [0, count) on a pool of worker threads. Each index is
/// processed exactly once; fn must only write state owned by its index, which
/// keeps results independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fcggnn
