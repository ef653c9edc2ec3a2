#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qps {

// Runs fn(i) for i in [0, count). Work is split into contiguous blocks, one
// per worker; results must be written to per-index slots so the outcome is
// independent of scheduling. threads <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t lo = count * w / nw;
    const std::size_t hi = count * (w + 1) / nw;
    pool.emplace_back([=, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Reduction helper: each worker owns a Local accumulator; the caller merges
// the returned vector in worker order, which keeps reductions deterministic
// for a fixed thread count.
template <typename Local, typename Fn>
std::vector<Local> parallel_partition(std::size_t count, int threads, Fn&& fn) {
  const std::size_t nw =
      (threads <= 1 || count < 2) ? 1 : std::min<std::size_t>(threads, count);
  std::vector<Local> locals(nw);
  if (nw == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(locals[0], i);
    return locals;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t lo = count * w / nw;
    const std::size_t hi = count * (w + 1) / nw;
    pool.emplace_back([=, &fn, &locals] {
      for (std::size_t i = lo; i < hi; ++i) fn(locals[w], i);
    });
  }
  for (auto& t : pool) t.join();
  return locals;
}

}  // namespace qps
