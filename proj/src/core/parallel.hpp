#pragma once

#include <cstddef>
#include <functional>

namespace heterolp {

// Worker count: HETEROLP_THREADS if set and positive, else hardware
// concurrency (at least 1).
std::size_t thread_count();

// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on up to
// thread_count() threads. Chunk boundaries depend only on n and `grain`, so
// callers that reduce per-chunk results in index order are deterministic
// regardless of the thread count.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace heterolp
