#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace avgraph {

// Worker count: explicit request wins, then AVGRAPH_THREADS, then hardware.
inline int thread_budget(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AVGRAPH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end, chunk_index) over [0, count) in fixed-size chunks.
// Chunk boundaries depend only on count and chunk_size, never on the thread
// count, so callers that reduce per-chunk results in chunk order get the
// same floating-point answer for any number of workers.
template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t chunk_size, int threads, Fn&& fn) {
  if (count == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t num_chunks = (count + chunk_size - 1) / chunk_size;
  const int workers = std::min<std::size_t>(std::max(threads, 1), num_chunks);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(begin + chunk_size, count);
    fn(begin, end, c);
  };

  if (workers <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < num_chunks; c = next.fetch_add(1))
        run_chunk(c);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace avgraph
