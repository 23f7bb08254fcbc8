#ifndef ATTNPARSE_PARALLEL_HPP
#define ATTNPARSE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace attnparse {

// Hardware concurrency, capped by ATTNPARSE_THREADS when set to a positive integer.
std::size_t worker_count();

// Runs fn(i) for i in [0, count), spread over worker_count() threads. Each
// index is visited exactly once; callers write results into per-index slots so
// output does not depend on scheduling. The first exception is rethrown.
// Calls from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace attnparse

#endif  // ATTNPARSE_PARALLEL_HPP
