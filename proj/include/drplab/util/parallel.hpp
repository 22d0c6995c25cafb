#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drplab {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs fn(i) for i in [0, n). When `parallel` is false this is a plain loop,
// which is the serial reference path used by the kernel-equivalence tests.
// Every call site is written so that iteration i touches only slot i of its
// outputs; results are therefore identical bit for bit in both modes.
template <typename Fn>
void parallel_for(int n, bool parallel, Fn&& fn) {
    if (!parallel) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) fn(i);
#else
    for (int i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace drplab
