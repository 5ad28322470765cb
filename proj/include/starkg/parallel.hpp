#pragma once

#include <atomic>
#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace starkg {

/// Execution policy for the hot loops (transform evaluation, kernel sweeps,
/// reconstruction).  `serial` is the plain reference loop kept for testing;
/// `parallel` distributes iterations over OpenMP threads.  Both orderings
/// accumulate per-iteration results into preallocated slots, so the two
/// policies produce bitwise-identical output.
enum class ExecPolicy { serial, parallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, count).  Iterations must be independent and may
/// only write to disjoint locations.
///
/// An exception thrown by body must not escape an OpenMP region (that would
/// call std::terminate), so the parallel path captures the first exception,
/// lets the remaining iterations drain as no-ops, and rethrows after the
/// join.  The serial path propagates exceptions directly.
template <class Body>
void par_for(ExecPolicy policy, std::ptrdiff_t count, const Body& body) {
#ifdef _OPENMP
  if (policy == ExecPolicy::parallel) {
    std::exception_ptr first;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      if (failed.load(std::memory_order_acquire)) continue;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }
#else
  (void)policy;
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
}

}  // namespace starkg
