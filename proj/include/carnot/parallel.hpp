#pragma once
#include <cstddef>
#include <functional>

namespace carnot {

// Worker cap for parallel_for; 0 restores the hardware default.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n) across up to max_threads() workers in
// contiguous blocks.  Each index must write only to its own output slots,
// so results are bitwise independent of the worker count.  Exceptions from
// workers are rethrown on the calling thread.
void parallel_for(size_t n, const std::function<void(size_t)>& body);

} // namespace carnot
