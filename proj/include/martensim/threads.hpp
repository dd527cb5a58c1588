#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace marten {

// Worker count: MARTENSIM_THREADS when set, otherwise the hardware
// concurrency, clamped to [1, 256].
inline int thread_budget() {
  int n = 0;
  if (const char* env = std::getenv("MARTENSIM_THREADS")) {
    n = std::atoi(env);
  }
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (n <= 0) n = 1;
  if (n > 256) n = 256;
  return n;
}

// Runs fn(i) for every i in [0, count) across `threads` workers. Indices are
// claimed dynamically, so fn must write any results into per-index slots for
// the outcome to be independent of the schedule. The first exception wins and
// is rethrown on the calling thread.
template <typename Fn>
void parallel_for_index(std::int64_t count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads > count) threads = static_cast<int>(count);
  if (threads < 1) threads = 1;
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&]() {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace marten
