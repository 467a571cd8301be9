#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ddnm {

// Thread budget for parallel sections.  DDNM_THREADS overrides hardware
// concurrency; a value of 1 forces fully serial execution.
inline int thread_budget() {
  static int n = [] {
    if (const char* env = std::getenv("DDNM_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
  }();
  return n;
}

inline void set_thread_budget(int n);

namespace detail {
inline int& thread_override() {
  static int v = 0;  // 0 = use thread_budget()
  return v;
}
}  // namespace detail

inline void set_thread_budget(int n) { detail::thread_override() = n; }

inline int effective_threads() {
  int o = detail::thread_override();
  return o >= 1 ? o : thread_budget();
}

// Runs fn(i) for i in [0, n).  Work units must be independent; results go
// into caller-owned slots so the merge order stays deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int nthreads = std::min<std::size_t>(effective_threads(), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace ddnm
