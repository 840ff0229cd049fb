#pragma once

#include <cstddef>
#include <functional>

namespace opstat {

// Worker cap for parallel_for; 0 means hardware concurrency. Set once from
// the CLI's --threads flag.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for every i in [0, n), possibly on several threads. Callers
// must write results to per-index storage (and reduce sequentially
// afterwards) so that output is independent of scheduling order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace opstat
