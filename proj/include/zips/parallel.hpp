#ifndef ZIPS_PARALLEL_HPP
#define ZIPS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace zips {

unsigned default_threads();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must write
/// to disjoint outputs; the first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace zips

#endif  // ZIPS_PARALLEL_HPP
