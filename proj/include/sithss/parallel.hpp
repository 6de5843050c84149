#pragma once

#include <cstddef>
#include <functional>

namespace sithss {

/// Maps a requested worker count to an effective one; 0 means hardware concurrency.
int resolve_threads(int requested);

/// Reads SIT_HSS_THREADS (0 or unset = auto).
int threads_from_env();

/// Splits [0, n) into at most `threads` contiguous chunks and runs
/// body(chunk, begin, end) for each. Chunk boundaries depend on the thread
/// count, so callers must keep per-item results independent of chunking.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

/// Chunk count parallel_chunks will use for (n, threads).
std::size_t chunk_count(std::size_t n, int threads);

}  // namespace sithss
