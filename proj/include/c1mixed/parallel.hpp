#pragma once

#include <cstddef>
#include <functional>

namespace c1mixed {

/// Number of worker threads used by element loops. Defaults to the value of
/// the C1MIXED_THREADS environment variable, or 1 when unset.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write into per-index slots and reduce afterwards in index order, so
/// results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace c1mixed
