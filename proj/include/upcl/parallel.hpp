#ifndef UPCL_PARALLEL_HPP
#define UPCL_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace upcl {

// Runs fn(i) for i in [0, n) on up to `threads` workers.  Work items must
// write results only to their own index so the outcome does not depend on
// scheduling; reductions are then performed by the caller in index order.
// The first exception thrown by any item is rethrown on the calling thread.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (threads < 1) threads = 1;
    if (threads == 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = std::min(threads, n);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace upcl

#endif
