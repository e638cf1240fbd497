#pragma once

#include <cstddef>
#include <functional>

namespace hbl {

// Worker count: HBL_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

// Calls fn(i) for i in [0, count). Callers write results into slot i, so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace hbl
