#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace stratlab::detail {

/// Calls f(i) for i in [0, n) on up to `workers` threads. f must not throw.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    };
    if (workers == 1) {
        loop();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
}

} // namespace stratlab::detail
