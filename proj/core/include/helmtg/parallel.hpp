#ifndef HELMTG_PARALLEL_HPP
#define HELMTG_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace helmtg {

/// Process-wide worker count for parallel loops (set from the CLI --threads flag).
void set_thread_count(int n);
int thread_count();

/// Static block partition of [0, n) over the configured workers. Each index is
/// visited exactly once; results must go to independent slots so that runs are
/// deterministic regardless of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace helmtg

#endif
