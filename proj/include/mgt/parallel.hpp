#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mgt {

// Worker count: MGTKIT_THREADS if set, else hardware concurrency capped at 8.
// set_thread_count overrides both (used by the determinism checks).
int thread_count();
void set_thread_count(int n);  // 0 = back to env/hardware default

namespace detail {
inline int& thread_override() {
  static int v = 0;
  return v;
}
}  // namespace detail

inline int thread_count() {
  if (detail::thread_override() > 0) return detail::thread_override();
  if (const char* env = std::getenv("MGTKIT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

inline void set_thread_count(int n) { detail::thread_override() = n; }

// Runs fn(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
// Chunking depends only on n and chunk_size, never on the worker count, and
// callers must combine per-chunk results in chunk order; that makes every
// aggregate independent of MGTKIT_THREADS.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t chunk_size, Fn&& fn) {
  if (n == 0) return;
  std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  int workers = thread_count();
  if (workers <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      std::size_t c;
      {
        std::lock_guard<std::mutex> lk(mu);
        if (next >= n_chunks || first_error) return;
        c = next++;
      }
      try {
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  int spawn = static_cast<int>(std::min<std::size_t>(workers, n_chunks));
  pool.reserve(spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mgt
