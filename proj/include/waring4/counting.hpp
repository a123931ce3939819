// Arithmetic (non-quadrature) routes: R(n) by meet-in-the-middle, windowed
// batches of R(n), and the solution counts S^(j), T^(j).
#pragma once

#include "waring4/int128.hpp"
#include "waring4/parallel.hpp"
#include "waring4/params.hpp"
#include "waring4/weyl.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace waring4 {

/// x^4 for every x in the j-th range (P_j/2, P_j].
inline std::vector<std::int64_t> fourth_powers_in_range(const Parameters& P, int j) {
    const LatticeRange r = P.x_range(j);
    std::vector<std::int64_t> v;
    for (std::int64_t x = r.first(); x <= r.last(); ++x) v.push_back(static_cast<std::int64_t>(pow4(static_cast<std::uint64_t>(x))));
    return v;
}

/// Sorted multiset {a + b : a in A, b in B}.
inline std::vector<std::int64_t> pair_sums(const std::vector<std::int64_t>& A, const std::vector<std::int64_t>& B) {
    std::vector<std::int64_t> s;
    s.reserve(A.size() * B.size());
    for (std::int64_t a : A)
        for (std::int64_t b : B) s.push_back(a + b);
    std::sort(s.begin(), s.end());
    return s;
}

/// R(n) = #{x_j in (P_j/2, P_j], 0 <= y < Y : n = x1^4 + x2^4 + x3^4 + x4^4 + y}
/// by meet in the middle: a hash of x1^4 + x2^4, scanned over x3, x4, y.
inline std::uint64_t direct_R(std::int64_t n, const Parameters& P) {
    std::unordered_map<std::int64_t, std::uint32_t> first;
    for (std::int64_t a : fourth_powers_in_range(P, 1))
        for (std::int64_t b : fourth_powers_in_range(P, 2)) ++first[a + b];
    const auto x3 = fourth_powers_in_range(P, 3), x4 = fourth_powers_in_range(P, 4);
    const std::int64_t L = P.y_count();
    std::uint64_t total = 0;
    for (std::int64_t c : x3)
        for (std::int64_t d : x4)
            for (std::int64_t y = 0; y < L; ++y) {
                auto it = first.find(n - c - d - y);
                if (it != first.end()) total += it->second;
            }
    return total;
}

/// Smallest and largest n with R(n) possibly nonzero.
inline std::pair<std::int64_t, std::int64_t> R_support(const Parameters& P) {
    std::int64_t lo = 0, hi = P.y_count() - 1;
    for (int j = 1; j <= 4; ++j) {
        const LatticeRange r = P.x_range(j);
        if (r.empty()) return {1, 0};
        lo += static_cast<std::int64_t>(pow4(static_cast<std::uint64_t>(r.first())));
        hi += static_cast<std::int64_t>(pow4(static_cast<std::uint64_t>(r.last())));
    }
    return {lo, hi};
}

/// R(n) for every n in [n_lo, n_hi], computed window by window: a dense
/// count of x1^4+..+x4^4 over the window, then a sliding sum over y.
/// `sink(n, R(n))` is called in increasing n.
template <class Sink>
void for_each_R(const Parameters& P, std::int64_t n_lo, std::int64_t n_hi, const Exec& exec, Sink&& sink,
                std::int64_t window = std::int64_t{1} << 22) {
    if (n_lo > n_hi) return;
    const std::vector<std::int64_t> s12 = pair_sums(fourth_powers_in_range(P, 1), fourth_powers_in_range(P, 2));
    const std::vector<std::int64_t> s34 = pair_sums(fourth_powers_in_range(P, 3), fourth_powers_in_range(P, 4));
    const std::int64_t L = P.y_count();
    std::vector<std::uint32_t> A;
    for (std::int64_t w_lo = n_lo; w_lo <= n_hi; w_lo += window) {
        const std::int64_t w_hi = std::min(n_hi, w_lo + window - 1);
        const std::int64_t a_lo = w_lo - (L - 1);  // sums needed: [w_lo - L + 1, w_hi]
        A.assign(static_cast<std::size_t>(w_hi - a_lo + 1), 0);
        const std::size_t chunk = 64;
        parallel_for((s12.size() + chunk - 1) / chunk, exec, [&](std::size_t c) {
            const std::size_t ib = c * chunk, ie = std::min(s12.size(), ib + chunk);
            for (std::size_t i = ib; i < ie; ++i) {
                const std::int64_t a = s12[i];
                auto it = std::lower_bound(s34.begin(), s34.end(), a_lo - a);
                for (; it != s34.end() && a + *it <= w_hi; ++it) {
                    std::uint32_t& slot = A[static_cast<std::size_t>(a + *it - a_lo)];
                    if (exec.threads > 1) std::atomic_ref<std::uint32_t>(slot).fetch_add(1, std::memory_order_relaxed);
                    else ++slot;
                }
            }
        });
        std::uint64_t run = 0;  // sum of A over [n - L + 1, n]
        for (std::int64_t s = a_lo; s < w_lo; ++s) run += A[static_cast<std::size_t>(s - a_lo)];
        for (std::int64_t n = w_lo; n <= w_hi; ++n) {
            run += A[static_cast<std::size_t>(n - a_lo)];
            if (n - L >= a_lo) run -= A[static_cast<std::size_t>(n - L - a_lo)];
            sink(n, run);
        }
    }
}

// ---------------------------------------------------------------------------
// S^(j), T^(j) by counting

/// Dense distribution c(s) = #{x_j.., y : sum_{i>=j} x_i^4 + y = s}, s from `offset`.
struct SumDistribution {
    std::int64_t offset = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(std::int64_t s) const {
        if (s < offset || s >= offset + static_cast<std::int64_t>(counts.size())) return 0;
        return counts[static_cast<std::size_t>(s - offset)];
    }
};

inline constexpr std::uint64_t kMaxDistributionLength = std::uint64_t{1} << 28;

inline SumDistribution sum_distribution(const Parameters& P, int j) {
    if (j < 1 || j > 5) throw std::invalid_argument("sum_distribution: j must be in 1..5");
    SumDistribution d;
    d.counts = {1};
    auto add = [&](const std::vector<std::int64_t>& values) {
        if (values.empty()) {
            d.counts.clear();
            return;
        }
        const std::int64_t vmin = values.front(), vmax = values.back();
        const std::uint64_t len = d.counts.size() + static_cast<std::uint64_t>(vmax - vmin);
        if (len > kMaxDistributionLength) throw BudgetExceeded("sum_distribution: support too long");
        std::vector<std::uint64_t> next(static_cast<std::size_t>(len), 0);
        for (std::size_t s = 0; s < d.counts.size(); ++s)
            if (d.counts[s] != 0)
                for (std::int64_t v : values) next[s + static_cast<std::size_t>(v - vmin)] += d.counts[s];
        d.offset += vmin;
        d.counts = std::move(next);
    };
    for (int i = j; i <= 4 && !d.counts.empty(); ++i) add(fourth_powers_in_range(P, i));
    if (!d.counts.empty()) {
        std::vector<std::int64_t> ys;
        for (std::int64_t y = 0; y < P.y_count(); ++y) ys.push_back(y);
        add(ys);
    }
    return d;
}

/// S^(j): solutions of sum_{i>=j} (x_i^4 - x_i'^4) + y - y' = 0.
inline u128 S_count(const Parameters& P, int j) {
    const SumDistribution d = sum_distribution(P, j);
    u128 s = 0;
    for (std::uint64_t c : d.counts) s += static_cast<u128>(c) * c;
    return s;
}

/// T^(j): solutions of (x+h)^4 - x^4 = sum_{i>j} (x_i'^4 - x_i^4) + y' - y with
/// 1 <= h <= c_h P_j^-3 P_{j+1}^4, P_j/2 < x, x + h <= P_j.
inline u128 T_count(const Parameters& P, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("T_count: j must be in 1..3");
    const SumDistribution d = sum_distribution(P, j + 1);
    const std::int64_t len = static_cast<std::int64_t>(d.counts.size());
    const ShiftLattice lat(P.P(j), P.shift_bound(j));
    u128 total = 0;
    lat.visit(0, lat.size(), [&](std::uint64_t x, std::uint64_t h) {
        const u128 delta = difference_poly(x, h);
        if (delta >= static_cast<u128>(len)) return;
        const std::int64_t dd = static_cast<std::int64_t>(delta);
        for (std::int64_t i = 0; i + dd < len; ++i)
            total += static_cast<u128>(d.counts[static_cast<std::size_t>(i)]) * d.counts[static_cast<std::size_t>(i + dd)];
    });
    return total;
}

/// Y * prod_j (lattice count of x_j), j from `j` to 4: the diagonal solutions.
inline u128 diagonal_count(const Parameters& P, int j) {
    u128 c = static_cast<u128>(P.y_count());
    for (int i = j; i <= 4; ++i) c *= static_cast<u128>(std::max<std::int64_t>(0, P.x_range(i).count()));
    return c;
}

}  // namespace waring4
