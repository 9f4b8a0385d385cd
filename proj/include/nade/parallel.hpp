#pragma once

#include <cstddef>
#include <functional>

namespace nade {

// Worker count from NADE_THREADS, or 1 when unset/invalid.
int default_threads();

// Calls fn(i) for i in [0, n) over at most `threads` workers. Each index is
// handled exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace nade
