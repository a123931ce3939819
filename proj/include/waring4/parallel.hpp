// Worker fan-out and order-fixed reductions.
//
// Every reduction here combines partial results in an order that depends only
// on the problem size, never on the thread count or on scheduling, so results
// are bit-identical for any `Exec::threads`.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace waring4 {

/// Degree of parallelism handed down by the caller (the CLI owns it).
struct Exec {
    unsigned threads = 1;
};

/// Calls fn(i) for every i in [0, count), spreading indices over
/// `exec.threads` workers. The first exception thrown by any worker is
/// rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, const Exec& exec, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(std::max(1u, exec.threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        try {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) sum of `values`; the tree shape depends only on size.
template <class T>
T pairwise_sum(const T* values, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T acc = values[0];
        for (std::size_t i = 1; i < n; ++i) acc += values[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

inline constexpr std::size_t kReductionBlock = 4096;

/// Sums a sequence of `n` terms split into fixed blocks of kReductionBlock.
/// `block_sum(begin, end)` returns the sum of terms [begin, end) accumulated
/// in ascending order; block results are combined pairwise.
template <class T, class BlockFn>
T blocked_sum(std::size_t n, const Exec& exec, BlockFn&& block_sum) {
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<T> partial(blocks);
    parallel_for(blocks, exec, [&](std::size_t b) {
        const std::size_t begin = b * kReductionBlock;
        partial[b] = block_sum(begin, std::min(n, begin + kReductionBlock));
    });
    return pairwise_sum(partial.data(), partial.size());
}

}  // namespace waring4
