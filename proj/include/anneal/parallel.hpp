#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anneal {

// Thread count used when a caller passes 0. Honours ANNEAL_LAB_THREADS if set,
// otherwise falls back to the hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("ANNEAL_LAB_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline int resolve_threads(int requested) {
    return requested <= 0 ? default_threads() : requested;
}

// Runs body(i) for i in [0, n). threads == 1 gives the plain serial loop,
// which is the reference path the parallel one is tested against. Exceptions
// thrown by the body are captured and rethrown after the loop finishes.
template <class F>
void parallel_for(long n, int threads, F&& body) {
    threads = resolve_threads(threads);
    if (threads == 1 || n <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
#else
    for (long i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace anneal
