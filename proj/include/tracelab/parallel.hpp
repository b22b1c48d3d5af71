#pragma once

// Deterministic fork/join helpers. Work items are indexed; each item is
// evaluated by exactly one thread, results land in per-index slots and are
// combined by a fixed pairwise tree. Results therefore do not depend on the
// thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace tracelab::parallel {

namespace detail {
inline std::atomic<unsigned>& thread_setting()
{
    static std::atomic<unsigned> n{1};
    return n;
}
}  // namespace detail

inline void set_threads(unsigned n) { detail::thread_setting() = std::max(1u, n); }
inline unsigned threads() { return detail::thread_setting(); }

template <class Fn>
void for_each_index(std::size_t count, Fn&& fn)
{
    const std::size_t nt = std::min<std::size_t>(threads(), count);
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    // Interleaved static schedule balances triangular loops.
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(nt);
        for (std::size_t t = 0; t < nt; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += nt) fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Pairwise sum over a canonical order.
inline double pairwise_sum(std::span<const double> v)
{
    if (v.empty()) return 0.0;
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Evaluates fn(i) for i in [0, count) in parallel and reduces the terms
/// in index order.
template <class Fn>
double sum_terms(std::size_t count, Fn&& fn)
{
    std::vector<double> terms(count, 0.0);
    for_each_index(count, [&](std::size_t i) { terms[i] = fn(i); });
    return pairwise_sum(terms);
}

}  // namespace tracelab::parallel
