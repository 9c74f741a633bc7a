#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Replica-level parallelism. Each replica is a pure function of its index, so
// the OpenMP path writes into a pre-sized vector and is bit-identical to the
// serial reference for any worker count; aggregation happens in index order.

namespace growthlab {

inline int effective_workers(int workers) {
#ifdef _OPENMP
    if (workers <= 0) return omp_get_max_threads();
    return workers;
#else
    (void)workers;
    return 1;
#endif
}

template <class T, class F>
std::vector<T> run_indexed_serial(int64_t count, F&& f) {
    std::vector<T> out(static_cast<size_t>(count));
    for (int64_t i = 0; i < count; ++i) out[size_t(i)] = f(i);
    return out;
}

template <class T, class F>
std::vector<T> run_indexed(int64_t count, int workers, F&& f) {
    const int nw = effective_workers(workers);
    if (nw <= 1 || count <= 1) return run_indexed_serial<T>(count, f);
    std::vector<T> out(static_cast<size_t>(count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nw)
#endif
    for (int64_t i = 0; i < count; ++i) out[size_t(i)] = f(i);
    return out;
}

}  // namespace growthlab
