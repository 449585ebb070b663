#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace heavytail {

/// Worker count for replica-parallel kernels. Results never depend on it.
struct Exec {
  int workers = 1;
};

/// Runs body(i) for every replica i in [0, n). Each body writes only to its
/// own slot; callers reduce the slots serially in replica order afterwards.
/// An exception thrown by a body is rethrown on the calling thread once the
/// loop has finished.
template <class Body>
void for_each_replica(std::size_t n, Exec exec, Body&& body) {
  const auto count = static_cast<std::int64_t>(n);
  const int workers = exec.workers < 1 ? 1 : exec.workers;
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace heavytail
