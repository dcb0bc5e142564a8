#ifndef MOE_PARALLEL_HPP
#define MOE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace moe {

// Runs fn(i) for i in [0, n).  Work is split into contiguous chunks, one per
// worker.  Results must be written to disjoint slots; reductions happen in the
// caller after the join, in index order, so output is worker-count invariant.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, n);
    std::exception_ptr err;
    std::mutex err_mtx;
    std::vector<std::thread> threads;
    threads.reserve(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        threads.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mtx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace moe

#endif
