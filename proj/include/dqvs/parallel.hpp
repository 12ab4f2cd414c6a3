#pragma once

// Small helpers for the OpenMP lanes. Every parallel loop in this project
// writes results by index, so a run is bit-identical with any thread count
// and with the serial reference path (parallel = false).

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqvs::par {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

template <typename F>
void for_each_index(int n, bool parallel, F&& fn) {
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (int i = 0; i < n; ++i) {
    fn(i);
  }
}

}  // namespace dqvs::par
