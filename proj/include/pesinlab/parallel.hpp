#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace pesinlab {

// Index-parallel map: out[i] = fn(i). Results land in index order, so the
// reduction a caller performs over `out` is independent of the worker count.
// fn must be pure given its index (derive RNG streams from the index).
template <class R, class Fn>
std::vector<R> run_indexed(std::size_t n, int workers, Fn&& fn) {
  std::vector<R> out(n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n) break;
      const std::size_t end = begin + kChunk < n ? begin + kChunk : n;
      for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace pesinlab
