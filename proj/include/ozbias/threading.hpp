#pragma once

#include <functional>

namespace ozbias {

// Process-wide worker pool. Work is split into contiguous index ranges, one
// per worker, so any reduction performed inside a range keeps a fixed order;
// results never depend on the thread count.

void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over a partition of [0, n).
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace ozbias
