#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

namespace sbs {

/// Runs body(i) for i in [0, n) on `threads` OpenMP workers with a static
/// schedule. If bodies throw, the exception from the smallest index is
/// rethrown after the loop, so failures are reported deterministically.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::mutex guard;
  const long long count = static_cast<long long>(n);

#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sbs
