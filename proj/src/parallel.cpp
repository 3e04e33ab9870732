#include "carnot/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace carnot {

namespace {
int g_max_threads = 0;  // 0 = use hardware concurrency
}

void set_max_threads(int n) { g_max_threads = n < 0 ? 0 : n; }

int max_threads() {
    if (g_max_threads > 0) return g_max_threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(size_t n, const std::function<void(size_t)>& body) {
    if (n == 0) return;
    const size_t nt = std::min<size_t>(static_cast<size_t>(max_threads()), n);
    if (nt <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errs(nt);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (size_t w = 0; w < nt; ++w) {
        const size_t lo = n * w / nt, hi = n * (w + 1) / nt;
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace carnot
