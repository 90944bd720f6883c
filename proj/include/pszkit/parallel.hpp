#pragma once

// Execution-mode switch shared by all data-parallel kernels.  Every kernel
// takes an Exec argument and routes its outer loop through for_each_index();
// the serial path is the reference implementation, the parallel path is the
// same per-index lambda under OpenMP.  Because each index owns a disjoint
// slice of the output, the two paths produce bit-identical results.

#include <atomic>
#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pszkit {

enum class Exec { serial, parallel };

// Run f(i) for i in [0, n).  The callable must only write state owned by
// index i.  Exceptions thrown by f are captured (first wins) and rethrown
// on the calling thread after the loop completes.
template <class F>
void for_each_index(std::int64_t n, Exec mode, F&& f) {
#ifdef _OPENMP
  if (mode == Exec::parallel) {
    std::exception_ptr err;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)mode;
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace pszkit
