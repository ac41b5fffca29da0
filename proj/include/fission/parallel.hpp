#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

// Row-parallel loops with deterministic results: every index is processed by
// exactly one worker and writes only its own output slots, so the result never
// depends on the number of threads.

namespace fission::parallel {

namespace detail {
inline std::atomic<int>& thread_override() {
    static std::atomic<int> value{-1};
    return value;
}
} // namespace detail

/// Worker count. FC_THREADS caps it (0 or unset = hardware concurrency).
inline unsigned thread_count() {
    int requested = detail::thread_override().load();
    if (requested < 0) {
        requested = 0;
        if (const char* env = std::getenv("FC_THREADS")) {
            try {
                requested = std::max(0, std::stoi(env));
            } catch (const std::exception&) {
                requested = 0;
            }
        }
    }
    if (requested == 0) requested = static_cast<int>(std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::max(1, requested));
}

/// Overrides FC_THREADS for the lifetime of the object (tests, benchmarks).
class ScopedThreadCount {
public:
    explicit ScopedThreadCount(int threads) : previous_(detail::thread_override().exchange(threads)) {}
    ~ScopedThreadCount() { detail::thread_override().store(previous_); }
    ScopedThreadCount(const ScopedThreadCount&) = delete;
    ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

private:
    int previous_;
};

/// Calls body(begin, end) over contiguous blocks covering [0, count).
template <class Body>
void for_each_block(std::size_t count, Body&& body, std::size_t min_block = 64) {
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), (count + min_block - 1) / std::max<std::size_t>(min_block, 1));
    if (workers <= 1) {
        if (count > 0) body(std::size_t{0}, count);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace fission::parallel
