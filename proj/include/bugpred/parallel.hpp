#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#else
#include <thread>
#endif

namespace bugpred {

inline int default_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
#endif
}

// Runs fn(i) for i in [0, count). workers <= 1 takes the plain serial loop,
// which doubles as the reference path the tests compare against; otherwise
// iterations are distributed over an OpenMP team with dynamic scheduling.
//
// Iterations must be independent, must seed any randomness from i alone, and
// must not throw, so the result is identical at every worker count.
template <class Fn>
void parallel_tasks(std::size_t count, int workers, Fn&& fn) {
#ifdef _OPENMP
    if (workers > 1 && count > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace bugpred
