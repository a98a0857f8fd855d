#include "sphcov/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace sphcov {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = hardware_concurrency

constexpr std::size_t kMinChunk = 256;
constexpr std::size_t kTargetChunks = 64;
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
  const int configured = g_max_threads.load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::size_t chunk_count(std::size_t n) {
  if (n == 0) return 0;
  const std::size_t by_size = (n + kMinChunk - 1) / kMinChunk;
  return std::max<std::size_t>(1, std::min(by_size, kTargetChunks));
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(n);
  if (chunks == 0) return;
  const std::size_t step = (n + chunks - 1) / chunks;

  const int workers =
      std::min<int>(max_threads(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * step;
      fn(begin, std::min(n, begin + step));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t begin = c * step;
      fn(begin, std::min(n, begin + step));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace sphcov
