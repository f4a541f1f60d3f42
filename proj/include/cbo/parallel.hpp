#pragma once

#include <functional>

namespace cbo {

// Worker count: CBO_THREADS if set (>= 1), otherwise hardware concurrency.
int thread_budget();

// Runs task(0..n_tasks-1) across up to n_threads workers. Tasks must write
// only to their own preallocated slots; results are then independent of
// scheduling. The first exception thrown by a task is rethrown after all
// workers finish.
void parallel_for(int n_tasks, int n_threads, const std::function<void(int)>& task);

}  // namespace cbo
