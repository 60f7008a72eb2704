#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace stablelab {

/// Runs `chunk_fn(chunk_index)` for chunk_index in [0, n_chunks) across up to
/// `workers` threads. Results must be written into per-chunk slots by the
/// callee; chunk -> slot assignment is fixed, so the merged result does not
/// depend on the worker count.
inline void run_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& chunk_fn,
                       unsigned workers = 0) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) chunk_fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_chunks) return;
                chunk_fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stablelab
