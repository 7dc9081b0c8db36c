#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace iabc {

// Every data-parallel kernel takes an Exec argument. Serial is the reference
// path; Parallel runs the same per-item code under OpenMP and must produce
// bitwise-identical results (each item writes its own slot, reductions are
// exact max/min).
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace iabc
