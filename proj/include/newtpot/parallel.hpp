#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace newtpot {

/// Runs body(i) for i in [0, count) on up to `threads` workers.  Work items are
/// claimed dynamically but each writes only its own slot, so callers that
/// reduce in index order get results independent of the thread count.  The
/// exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// out[i] = fn(i), evaluated in parallel.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
  std::vector<T> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace newtpot
