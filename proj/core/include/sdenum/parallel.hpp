#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sdenum {

// Fixed chunk width for path-parallel work. Results are accumulated per
// chunk and reduced in chunk order, so reports do not depend on the number
// of workers.
inline constexpr std::int64_t kPathChunk = 64;

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

inline std::int64_t chunk_count(std::int64_t n_items) {
  return (n_items + kPathChunk - 1) / kPathChunk;
}

// Runs fn(begin, end, chunk_index) over [0, n_items) in chunks of kPathChunk.
// Workers pull chunks from a shared counter; fn must write only to state
// keyed by chunk_index (or item index) for thread-count invariance.
inline void parallel_chunks(
    std::int64_t n_items, int threads,
    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  const std::int64_t n_chunks = chunk_count(n_items);
  const int n_workers =
      static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), n_chunks));

  auto run_chunk = [&](std::int64_t c) {
    const std::int64_t begin = c * kPathChunk;
    const std::int64_t end = std::min(begin + kPathChunk, n_items);
    fn(begin, end, c);
  };

  if (n_workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) break;
      try {
        run_chunk(c);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) {
          first_error = std::current_exception();
        }
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sdenum
