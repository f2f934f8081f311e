#ifndef EDGECACHE_PARALLEL_H_
#define EDGECACHE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace edgecache {

// Worker count: EDGECACHE_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t worker_count();

// Calls fn(k) for k in [0, n) on up to worker_count() threads. Each index
// runs exactly once; results must be written to per-index slots. The first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace edgecache

#endif  // EDGECACHE_PARALLEL_H_
