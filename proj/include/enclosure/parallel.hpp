#pragma once

#include <functional>

namespace enclosure {

/// Worker count: ENCLOSURE_THREADS if set, else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [begin, end) across worker threads in contiguous
/// chunks. Callers must write to disjoint state per index; reductions stay
/// with the caller so results are deterministic regardless of thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace enclosure
