#pragma once

/// Deterministic data parallelism. Work items write to disjoint slots
/// indexed by item, so results are identical for any thread count. The
/// LSC_THREADS environment variable caps the pool; 0 forces sequential
/// execution (the determinism-reference mode, also the default when the
/// variable is unset).

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lsc {

inline int& thread_override() {
  static int value = -1;  // -1: read LSC_THREADS lazily
  return value;
}

/// Cap used by parallel_for. Settable in-process for tests; otherwise taken
/// from LSC_THREADS (default 0 = sequential).
inline int thread_count() {
  int v = thread_override();
  if (v >= 0) return v;
  const char* env = std::getenv("LSC_THREADS");
  if (env == nullptr) return 0;
  const long parsed = std::strtol(env, nullptr, 10);
  if (parsed <= 0) return 0;
  return static_cast<int>(parsed);
}

inline void set_thread_count(int n) { thread_override() = n < 0 ? -1 : n; }

template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
  const int threads = thread_count();
  if (threads <= 1 || count < 2) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(static_cast<size_t>(spawn));
  for (int t = 0; t < spawn - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace lsc
