#pragma once

#include <functional>

namespace jjr {

/// Thread count from JJR_THREADS, else hardware concurrency (min 1).
int default_threads();

/// Runs fn(i) for i in [0, n) on `threads` workers (0 = default_threads()).
/// Work items must be independent; exceptions other than per-item handled
/// ones propagate to the caller after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace jjr
