#ifndef SRPCA_PARALLEL_HPP
#define SRPCA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace srpca {

// Effective worker count: SRPCA_THREADS when set (clamped to >= 1),
// otherwise the hardware concurrency.
std::size_t thread_count();

// Runs fn(i) for i in [0, n) on contiguous chunks across worker threads.
// Each index must write to disjoint state; the result is then independent
// of the schedule. Runs inline when n is small or one thread is available.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace srpca

#endif
