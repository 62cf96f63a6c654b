#include "mbl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mbl {

namespace {
std::atomic<int> g_threads{0};
}

void set_worker_threads(int n) { g_threads.store(n > 0 ? n : 0); }

int worker_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t, int64_t)>& fn, int threads) {
    if (end <= begin) return;
    int n = threads > 0 ? threads : worker_threads();
    int64_t count = end - begin;
    n = int(std::min<int64_t>(n, count));
    if (n <= 1) {
        fn(begin, end);
        return;
    }
    int64_t chunk = (count + n - 1) / n;
    std::vector<std::thread> pool;
    pool.reserve(size_t(n));
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int i = 0; i < n; ++i) {
        int64_t lo = begin + i * chunk;
        int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace mbl
