#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace walshlab {

/// Worker count from WALSHLAB_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("WALSHLAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// out[k] = fn(k) for k < n. Results are stored by index, so the output does
/// not depend on scheduling; the first exception (by index) is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, unsigned threads = thread_count()) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        out[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace walshlab
