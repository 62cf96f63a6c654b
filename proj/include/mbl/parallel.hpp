#pragma once

#include <cstdint>
#include <functional>

namespace mbl {

// Process-wide worker count used by the pixel-tile and per-window loops.
// Results never depend on it; only wall time does.
void set_worker_threads(int n);
int worker_threads();

// Splits [begin, end) into contiguous chunks and runs `fn(chunk_begin,
// chunk_end)` on up to `threads` workers (current global count if <= 0).
// Chunk boundaries depend only on the range and thread count, and chunks
// write to disjoint output slots, so output is schedule-independent.
void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t, int64_t)>& fn,
                  int threads = 0);

} // namespace mbl
