#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace liqspread::detail {

/// Runs fn(lo, hi) over contiguous chunks of [0, n) on up to `threads`
/// workers and rethrows the first worker exception.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::size_t w = 0;
    for (std::size_t lo = 0; lo < n; lo += chunk, ++w)
        pool.emplace_back([&fn, &errors, w, lo, hi = std::min(n, lo + chunk)] {
            try {
                fn(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace liqspread::detail
