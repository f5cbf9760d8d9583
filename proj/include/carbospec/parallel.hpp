#pragma once

#include <cstddef>
#include <functional>

namespace carbospec {

// Process-wide worker pool. parallelFor splits [0, n) into contiguous chunks;
// every index is processed by exactly one worker with thread-count-independent
// arithmetic, so results are bit-identical whether run on 1 or N threads.
// Thread count resolution order: setThreadCount() > CARBOSPEC_THREADS env >
// hardware concurrency.
void setThreadCount(int threads);
int threadCount();

void parallelFor(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& body);

} // namespace carbospec
