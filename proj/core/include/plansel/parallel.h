#ifndef PLANSEL_PARALLEL_H_
#define PLANSEL_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plansel {

// Number of workers used when callers pass 0.
inline size_t DefaultConcurrency() {
  return std::max<size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to
// state owned by index i. The first exception thrown by any worker is
// rethrown after all workers join.
template <typename Fn>
void ParallelFor(size_t n, Fn&& fn, size_t workers = 0,
                 size_t min_per_worker = 64) {
  if (workers == 0) workers = DefaultConcurrency();
  workers = std::min(workers, std::max<size_t>(1, n / min_per_worker));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        for (size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace plansel

#endif  // PLANSEL_PARALLEL_H_
