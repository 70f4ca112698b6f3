#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace selmerlab {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Workers pull
/// small chunks from a shared counter. The first exception is rethrown
/// after all workers stop.
template <class Body>
void parallel_for(std::uint64_t count, unsigned jobs, Body&& body) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::uint64_t chunk = std::max<std::uint64_t>(1, count / (64ULL * jobs));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t start = next.fetch_add(chunk);
      if (start >= count) return;
      const std::uint64_t stop = std::min(count, start + chunk);
      try {
        for (std::uint64_t i = start; i < stop; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace selmerlab
