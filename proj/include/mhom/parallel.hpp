#pragma once

// Index-parallel loop over a fixed worker count. Each task writes its own
// slot, so results never depend on scheduling. The exception thrown by the
// lowest failing index is rethrown after all workers stop.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mhom {

template <class F>
void parallel_for(std::size_t count, int jobs, F &&task) {
  if (count == 0) return;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, jobs > 0 ? jobs : 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::size_t err_index = count;
  std::exception_ptr err;

  const auto run = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto &t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace mhom
