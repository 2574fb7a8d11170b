#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace basinforge {

// Thread cap: BASINFORGE_THREADS, else hardware concurrency.
inline int thread_limit() {
    if (const char* env = std::getenv("BASINFORGE_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static block partition; results must be written to per-index slots so the
// outcome does not depend on scheduling.
inline void parallel_for(int begin, int end, const std::function<void(int)>& body) {
    int n = end - begin;
    if (n <= 0) return;
    int threads = std::min(thread_limit(), n);
    if (threads <= 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = begin + t * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace basinforge
