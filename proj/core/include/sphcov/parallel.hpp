#pragma once

#include <cstddef>
#include <functional>

namespace sphcov {

/// Process-wide worker cap for parallel loops (defaults to all cores).
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin, end) over chunks of [0, n). Chunk boundaries depend only
/// on n, never on the thread count, so per-chunk results (and any reduction
/// done in chunk order) are reproducible under any --threads setting.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

/// Number of chunks parallel_chunks will use for a loop of length n.
std::size_t chunk_count(std::size_t n);

}  // namespace sphcov
