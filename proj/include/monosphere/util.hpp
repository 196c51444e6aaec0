#pragma once

#include <functional>

namespace monosphere::util {

// Worker-thread cap: MONOSPHERE_THREADS when set, else hardware concurrency.
int worker_threads();

// Runs fn(i) for i in [0, n); results must go into per-index slots so the
// outcome is independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace monosphere::util
