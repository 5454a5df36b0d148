#ifndef ELLIPVMO_PARALLEL_HPP
#define ELLIPVMO_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ellipvmo {

/// Worker-pool size: 0 picks hardware concurrency.  Results never
/// depend on this, only wall time does.
inline unsigned& worker_count_setting() {
    static unsigned count = 0;
    return count;
}
inline void set_worker_count(unsigned n) { worker_count_setting() = n; }

/** Run fn(begin, end) over a partition of [0, n) into contiguous chunks,
 * one per worker thread.  Each index owns its output slot, so results do
 * not depend on the worker count.  The first exception thrown by any
 * worker is rethrown on the calling thread.
 */
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
    unsigned workers = worker_count_setting();
    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers <= 1 || n < 4096) {
        fn(0, n);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Run fn(i) for every i in [0, n), chunked as in parallel_chunks.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_chunks(n, [&fn](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

}  // namespace ellipvmo

#endif
