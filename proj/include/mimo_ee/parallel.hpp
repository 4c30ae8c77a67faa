// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mimo_ee {

/// Worker count: EE_THREADS if set (min 1), else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("EE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Results must be
/// written to per-index storage; reductions happen after all workers join,
/// so the outcome is independent of the worker count.
template <typename Fn>
void parallel_chunks(long n, Fn&& fn) {
    const int workers = std::min<long>(thread_count(), std::max(1L, n));
    if (workers <= 1 || n <= 1) {
        fn(0L, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long begin = w * chunk;
        const long end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace mimo_ee
