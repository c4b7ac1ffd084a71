#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rankident {

// Thread count used by the parallel loops; 0 means hardware concurrency.
// Results never depend on this value: work items own seeded streams and
// partial results are merged in item order.
inline int& parallel_thread_override() {
    static int value = 0;
    return value;
}

inline int effective_thread_count(std::size_t items) {
    int n = parallel_thread_override();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (static_cast<std::size_t>(n) > items) n = static_cast<int>(items == 0 ? 1 : items);
    return n;
}

// Runs fn(i) for i in [0, items) across threads.
template <typename Fn>
void parallel_for(std::size_t items, Fn&& fn) {
    const int threads = effective_thread_count(items);
    if (threads <= 1) {
        for (std::size_t i = 0; i < items; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < items; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Maps every item through fn and returns the results in item order.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t items, Fn&& fn) {
    std::vector<Result> out(items);
    parallel_for(items, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace rankident
