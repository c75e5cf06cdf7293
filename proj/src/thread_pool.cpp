#include "jjr/thread_pool.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jjr {

int default_threads() {
    if (const char* env = std::getenv("JJR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 0) threads = default_threads();
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = static_cast<int>(std::min<std::size_t>(threads, n));
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace jjr
