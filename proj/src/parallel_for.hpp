#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace broadwell::detail {

// Block-partitioned parallel loop with disjoint writes per block; results are
// schedule-independent by construction.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n < 2 * threads) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::int64_t block = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t b = t * block;
        const std::int64_t e = std::min(n, b + block);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace broadwell::detail
