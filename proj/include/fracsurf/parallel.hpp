#pragma once

#include <cstddef>
#include <functional>

namespace fracsurf {

// Process-wide worker count used by parallel_for; 0 selects hardware concurrency.
void set_thread_count(int count);
int thread_count();

// Runs body(i) for i in [0, count). Calls made from inside a running body execute
// serially, so nested quadrature levels never oversubscribe. Results must be
// written to per-index slots; the caller reduces them in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fracsurf
