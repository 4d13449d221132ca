/*
 * parallel.hpp
 *
 * Index-parallel loop over a fixed worker count. Each index writes only its
 * own result slot, so output never depends on scheduling.
 */

#ifndef CARPET_PARALLEL_HPP_
#define CARPET_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace carpet {

/// 0 selects std::thread::hardware_concurrency().
inline unsigned resolveThreads(unsigned threads) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    return threads;
}

/**
 * Calls f(i) for i in [0, count) on up to `threads` workers. The exception
 * thrown for the smallest index (if any) is rethrown after all workers join.
 */
template <typename F>
void parallelFor(std::size_t count, unsigned threads, F&& f) {
    threads = std::min<unsigned>(resolveThreads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::size_t failedIndex = count;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (i < failedIndex) {
                    failedIndex = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace carpet

#endif // CARPET_PARALLEL_HPP_
