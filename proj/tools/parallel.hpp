#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fyflow::cli {

/// Worker count from FYFLOW_THREADS (default 1, clamped to hardware).
inline int thread_count() {
    const char* env = std::getenv("FYFLOW_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    if (n < 1) n = 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw > 0 && n > hw) n = hw;
    return n;
}

/// Run fn(0..count-1), possibly on a worker pool. Each index owns its output
/// slot, so results are identical for any thread count; callers collect in
/// index order.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = thread_count();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fyflow::cli
