#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lrdet {

// Deterministic fan-out: fn(i) for i in [0, n), results land in index order
// regardless of thread count. fn must be safe to call concurrently.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> results(n);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) results[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace lrdet
