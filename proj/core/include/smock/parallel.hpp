#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace smock {

// Worker cap: min(SMOCKLAB_THREADS, hardware concurrency), at least 1.
inline int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SMOCKLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

// Runs fn(i) for i in [0, n).  fn must be a pure function of i (results
// identical to sequential execution by construction).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = max_threads();
    if (workers == 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace smock
