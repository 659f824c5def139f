#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace vista {

// Runs fn(i) for i in [0, count) across at most max_workers threads. Exceptions
// must be handled inside fn; items are independent by contract.
inline void parallel_for(size_t count, size_t max_workers, const std::function<void(size_t)>& fn) {
    if (count == 0) return;
    size_t workers = max_workers == 0 ? 1 : max_workers;
    if (workers > count) workers = count;
    if (workers == 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace vista
