#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jitcluster {

/// Runs fn(i) for i in [0, count) on up to `workers` threads, each owning one
/// contiguous block. Callers write results into preassigned slots, so the
/// outcome never depends on the worker count. The first exception thrown by
/// any worker is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace jitcluster
