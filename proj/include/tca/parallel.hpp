#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace tca {

/// Runs fn(i) for i in [0, count) on up to max_threads workers.
/// Tasks must write only to their own output slot; iteration order is
/// unspecified but every index runs exactly once.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t max_threads, Fn&& fn) {
  if (count == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t n_threads = max_threads == 0 ? hw : max_threads;
  if (n_threads > count) n_threads = count;

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    workers.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace tca
