#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace gsm {

// Runs fn(i) for i in [0, total) across `workers` threads with static block
// partitioning. fn must be pure given i (each trial owns its RNG stream), so
// results are identical for every worker count.
template <typename Fn>
void parallel_for_index(std::int64_t total, int workers, Fn&& fn) {
    if (workers <= 1 || total < 2 * workers) {
        for (std::int64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace gsm
