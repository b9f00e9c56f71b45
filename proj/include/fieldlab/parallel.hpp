#pragma once

#include <cstddef>
#include <functional>

namespace fieldlab {

/// Worker count: explicit value if > 0, else FIELDLAB_WORKERS, else hardware concurrency.
int resolve_workers(int requested);
void set_default_workers(int n);
int default_workers();

/// Runs fn(i) for i in [0, n) over a static partition. Each index writes its
/// own output slot; callers reduce serially in index order, so results do not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace fieldlab
