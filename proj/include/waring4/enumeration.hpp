// Sums of four positive fourth powers: enumeration, gap statistics,
// empty-interval counters and the greedy approximation.
#pragma once

#include "waring4/int128.hpp"
#include "waring4/parallel.hpp"
#include "waring4/params.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace waring4 {

struct EnumerationOptions {
    /// Largest bitmap (in bits) ever allocated.
    u128 max_bitmap_bits = static_cast<u128>(1) << 30;
    /// Width of a pass once the range no longer fits the bitmap budget.
    u128 window_bits = static_cast<u128>(1) << 30;
    /// Use windows of `window_bits` even when the whole range would fit.
    bool force_windowed = false;
    Exec exec{};
};

namespace detail {

inline u128 ceil_div(u128 a, u128 b) { return a / b + (a % b != 0 ? 1 : 0); }

/// Marks every x1^4+x2^4+x3^4+x4^4 (x1 >= x2 >= x3 >= x4 >= 1) that falls in
/// [lo, hi] into `bits`, bit i standing for lo + i.
inline void mark_window(u128 lo, u128 hi, std::vector<std::uint64_t>& bits, const Exec& exec) {
    if (hi < 4 || lo > hi) return;
    const std::uint64_t x1_max = iroot4(hi - 3);
    const std::uint64_t x1_min = std::max<std::uint64_t>(1, ceil_root4(ceil_div(lo, 4)));
    if (x1_min > x1_max) return;
    const bool atomic = exec.threads > 1;
    auto set_bit = [&](u128 v) {
        const u128 off = v - lo;
        const auto word = static_cast<std::size_t>(off >> 6);
        const std::uint64_t mask = std::uint64_t{1} << static_cast<unsigned>(off & 63);
        if (atomic)
            std::atomic_ref<std::uint64_t>(bits[word]).fetch_or(mask, std::memory_order_relaxed);
        else
            bits[word] |= mask;
    };
    parallel_for(static_cast<std::size_t>(x1_max - x1_min + 1), exec, [&](std::size_t i) {
        const std::uint64_t x1 = x1_min + i;
        const u128 s1 = pow4(x1);
        // s1 + x2^4 + 2 <= hi and s1 + 3 x2^4 >= lo
        std::uint64_t x2_hi = std::min(x1, iroot4(hi - s1 - 2));
        std::uint64_t x2_lo = lo > s1 ? std::max<std::uint64_t>(1, ceil_root4(ceil_div(lo - s1, 3))) : 1;
        for (std::uint64_t x2 = x2_lo; x2 <= x2_hi; ++x2) {
            const u128 s2 = s1 + pow4(x2);
            if (s2 + 2 > hi) break;
            std::uint64_t x3_hi = std::min(x2, iroot4(hi - s2 - 1));
            std::uint64_t x3_lo = lo > s2 ? std::max<std::uint64_t>(1, ceil_root4(ceil_div(lo - s2, 2))) : 1;
            for (std::uint64_t x3 = x3_lo; x3 <= x3_hi; ++x3) {
                const u128 s3 = s2 + pow4(x3);
                if (s3 + 1 > hi) break;
                const std::uint64_t x4_hi = std::min(x3, iroot4(hi - s3));
                const std::uint64_t x4_lo = lo > s3 ? std::max<std::uint64_t>(1, ceil_root4(lo - s3)) : 1;
                for (std::uint64_t x4 = x4_lo; x4 <= x4_hi; ++x4) set_bit(s3 + pow4(x4));
            }
        }
    });
}

}  // namespace detail

/// Streams, in increasing order, every integer n <= limit of the form
/// x1^4+x2^4+x3^4+x4^4 with all x_i >= 1. `sink(n)` is called once per value.
/// A single bitmap covers the range when it fits `max_bitmap_bits`; otherwise
/// the range is processed in windows of `window_bits`.
template <class Sink>
void enumerate_representable(u128 limit, const EnumerationOptions& opts, Sink&& sink) {
    if (limit < 4) return;
    const u128 span = limit - 3;  // values 4..limit
    u128 width = span;
    if (opts.force_windowed || span > opts.max_bitmap_bits) width = opts.window_bits;
    if (width == 0) throw std::invalid_argument("enumeration: window width must be positive");
    if (width > opts.max_bitmap_bits)
        throw BudgetExceeded("enumeration: window of " + to_string(width) + " bits exceeds the bitmap budget of " +
                             to_string(opts.max_bitmap_bits) + " bits");
    std::vector<std::uint64_t> bits;
    for (u128 lo = 4;; lo += width) {
        const u128 hi = (limit - lo < width - 1) ? limit : lo + width - 1;
        const auto words = static_cast<std::size_t>((hi - lo) / 64 + 1);
        bits.assign(words, 0);
        detail::mark_window(lo, hi, bits, opts.exec);
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t word = bits[w];
            while (word != 0) {
                const int b = std::countr_zero(word);
                word &= word - 1;
                sink(lo + static_cast<u128>(w) * 64 + static_cast<u128>(b));
            }
        }
        if (hi == limit) break;
    }
}

inline std::vector<u128> representable_up_to(u128 limit, const EnumerationOptions& opts = {}) {
    std::vector<u128> out;
    enumerate_representable(limit, opts, [&](u128 n) { out.push_back(n); });
    return out;
}

// ---------------------------------------------------------------------------
// Gap statistics

struct GapReport {
    u128 limit = 0;
    std::uint64_t count = 0;
    u128 smallest = 0;
    u128 largest = 0;
    u128 max_gap = 0;
    /// Right end of the first gap of maximal size; empty when count < 2.
    std::optional<u128> max_gap_location;
    std::map<u128, std::uint64_t> histogram;
};

inline GapReport gap_statistics(u128 limit, const EnumerationOptions& opts = {}) {
    GapReport r;
    r.limit = limit;
    std::optional<u128> prev;
    enumerate_representable(limit, opts, [&](u128 n) {
        if (prev) {
            const u128 gap = n - *prev;
            ++r.histogram[gap];
            if (gap > r.max_gap) {
                r.max_gap = gap;
                r.max_gap_location = n;
            }
        } else {
            r.smallest = n;
        }
        r.largest = n;
        ++r.count;
        prev = n;
    });
    return r;
}

// ---------------------------------------------------------------------------
// Empty intervals

/// K'(N, Y): the number of n in (N/2, N] such that no element of (n - Y, n]
/// is a sum of four positive fourth powers.
inline std::uint64_t count_empty_intervals(u128 N, double Y, const EnumerationOptions& opts = {}) {
    if (N < 8) throw std::invalid_argument("count_empty_intervals: N must be >= 8");
    const u128 first = N / 2 + 1;
    // n is empty iff n - prev(n) >= ceil(Y), prev(n) the largest element <= n.
    const double cy = std::ceil(Y);
    const u128 need = cy <= 0 ? 0 : static_cast<u128>(cy);
    std::uint64_t empty = 0;
    auto count_range = [&](u128 a, u128 b) {  // n in [a, b] intersected with [first, N]
        a = std::max(a, first);
        b = std::min(b, N);
        if (a <= b) empty += static_cast<std::uint64_t>(b - a + 1);
    };
    std::optional<u128> prev;
    auto close_gap = [&](u128 next_exclusive) {
        if (!prev) {
            if (next_exclusive > 1) count_range(1, next_exclusive - 1);  // nothing representable yet
        } else if (*prev + need <= next_exclusive - 1) {
            count_range(*prev + need, next_exclusive - 1);
        }
    };
    enumerate_representable(N, opts, [&](u128 n) {
        close_gap(n);
        prev = n;
    });
    close_gap(N + 1);
    return empty;
}

/// K_gamma(N): the number of n in [1, N] such that no element of
/// (n - n^gamma, n] is a sum of four positive fourth powers.
inline std::uint64_t count_empty_intervals_gamma(u128 N, double gamma, const EnumerationOptions& opts = {}) {
    std::uint64_t empty = 0;
    auto is_empty = [&](u128 n, u128 prev) {
        const long double width = std::pow(static_cast<long double>(n), static_cast<long double>(gamma));
        return static_cast<long double>(n - prev) >= width;
    };
    std::optional<u128> prev;
    // Scan n in [prev, next): emptiness is monotone in n when gamma <= 1.
    auto close_gap = [&](u128 next_exclusive) {
        const u128 stop = std::min(next_exclusive - 1, N);
        if (!prev) {
            if (stop >= 1) empty += static_cast<std::uint64_t>(stop);
            return;
        }
        const u128 start = *prev;
        if (start > stop) return;
        if (gamma <= 1.0) {
            if (!is_empty(stop, start)) return;
            u128 lo = start, hi = stop;  // first empty n in [start, stop]
            while (lo < hi) {
                const u128 mid = lo + (hi - lo) / 2;
                if (is_empty(mid, start)) hi = mid;
                else lo = mid + 1;
            }
            empty += static_cast<std::uint64_t>(stop - lo + 1);
        } else {
            for (u128 n = start; n <= stop; ++n)
                if (is_empty(n, start)) ++empty;
        }
    };
    enumerate_representable(N, opts, [&](u128 n) {
        close_gap(n);
        prev = n;
    });
    close_gap(N + 1);
    return empty;
}

// ---------------------------------------------------------------------------
// Greedy approximation

struct GreedyResult {
    u128 n = 0;
    std::array<std::uint64_t, 4> x{};
    u128 remainder = 0;
};

/// x1 = floor(n^{1/4}), then the same on the remainder, four times in all.
inline GreedyResult greedy_approx(u128 n) {
    if (n < 1) throw std::invalid_argument("greedy_approx: n must be >= 1");
    GreedyResult g;
    g.n = n;
    u128 rest = n;
    for (auto& xi : g.x) {
        xi = iroot4(rest);
        rest -= pow4(xi);
    }
    g.remainder = rest;
    return g;
}

}  // namespace waring4
