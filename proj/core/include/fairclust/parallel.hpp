#pragma once

#include <cstddef>
#include <functional>

namespace fairclust {

/// Worker cap used by every parallel map. Defaults to FAIRCLUST_THREADS when
/// set, otherwise to the OpenMP default.
int worker_count();

/// Overrides the worker cap; values < 1 restore the default.
void set_worker_count(int workers);

/// Runs body(i) for i in [0, n). Each index must write only its own outputs;
/// results are then independent of the worker count.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body);

/// Like parallel_for but without a minimum size, for a few coarse jobs
/// (one solver run each). Nested parallel_for calls run serially.
void parallel_tasks(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body);

}  // namespace fairclust
