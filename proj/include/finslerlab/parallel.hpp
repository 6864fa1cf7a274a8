#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace finslerlab {

// Worker count: FINSLERLAB_THREADS if set to a positive integer, otherwise
// the hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("FINSLERLAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

// Evaluates fn(i) for i in [0, count) and returns the results in index order.
// If any call throws, the exception of the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(int count, Fn fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<R> out(static_cast<std::size_t>(std::max(0, count)));
  std::vector<std::exception_ptr> errors(out.size());
  const int workers = std::min(thread_budget(), std::max(1, count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace finslerlab
