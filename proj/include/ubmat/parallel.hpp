#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef UBMAT_HAVE_OPENMP
#include <omp.h>
#endif

namespace ubmat {

/// Thread count for Monte Carlo loops: `requested` if positive, otherwise
/// the OpenMP default (1 without OpenMP).
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
#ifdef UBMAT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Calls body(i) for i in [0, count). Each index must write only its own
/// output slot; the first exception thrown by any index is rethrown.
template <typename Body>
void parallel_for(std::int64_t count, int threads, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#ifdef UBMAT_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  (void)threads;
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ubmat
