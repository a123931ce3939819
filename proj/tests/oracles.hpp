// Brute-force reference implementations. They share nothing with the library
// beyond the definitions: plain nested loops, arbitrary-precision integers
// and extended-precision floating point.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;
using lcplx = std::complex<long double>;

inline long long p4(long long x) { return x * x * x * x; }

/// Integers x with lower < x <= upper, where lower = c * X.
inline std::vector<long long> lattice(long double X, long double c) {
    std::vector<long long> v;
    for (long long x = 1; static_cast<long double>(x) <= X; ++x)
        if (static_cast<long double>(x) > c * X) v.push_back(x);
    return v;
}
inline std::vector<long long> xs(long double X) { return lattice(X, 0.5L); }
inline std::vector<long long> zs(long double X) {
    std::vector<long long> v;
    const long double hi = X * X * X * X;
    for (long long z = 1; static_cast<long double>(z) <= hi; ++z)
        if (static_cast<long double>(z) > hi / 16) v.push_back(z);
    return v;
}
inline std::vector<long long> ys(long double Y) {
    std::vector<long long> v;
    for (long long y = 0; static_cast<long double>(y) < Y; ++y) v.push_back(y);
    return v;
}

/// e(a m / q) with exact reduction of a m mod q.
inline lcplx e_frac(long long a, long long q, BigInt m) {
    BigInt r = (BigInt(a) * m) % q;
    if (r < 0) r += q;
    const long double t = static_cast<long double>(r.convert_to<long long>()) / static_cast<long double>(q);
    const long double ang = 2 * std::numbers::pi_v<long double> * t;
    return {std::cos(ang), std::sin(ang)};
}

inline lcplx f(long long a, long long q, long double X) {
    lcplx s{};
    for (long long x : xs(X)) s += e_frac(a, q, BigInt(p4(x)));
    return s;
}
inline lcplx g(long long a, long long q, long double Y) {
    lcplx s{};
    for (long long y : ys(Y)) s += e_frac(a, q, BigInt(y));
    return s;
}
inline lcplx nu(long long a, long long q, long double X) {
    lcplx s{};
    for (long long z : zs(X)) s += 0.25L * std::pow(static_cast<long double>(z), -0.75L) * e_frac(a, q, BigInt(z));
    return s;
}
inline lcplx H(long long a, long long q, long double X, long double Z) {
    lcplx s{};
    const auto r = xs(X);
    for (long long h = 1; static_cast<long double>(h) <= Z; ++h)
        for (long long x : r)
            if (x + h <= r.back()) s += e_frac(a, q, BigInt(p4(x + h) - p4(x)));
    return s;
}

/// Representable integers <= limit (every ordered 4-tuple, no pruning).
inline std::vector<bool> representable_bitmap(long long limit) {
    std::vector<bool> b(static_cast<std::size_t>(std::max(limit, 0LL) + 1), false);
    for (long long a = 1; p4(a) <= limit; ++a)
        for (long long c = 1; p4(a) + p4(c) <= limit; ++c)
            for (long long d = 1; p4(a) + p4(c) + p4(d) <= limit; ++d)
                for (long long e = 1; p4(a) + p4(c) + p4(d) + p4(e) <= limit; ++e)
                    b[static_cast<std::size_t>(p4(a) + p4(c) + p4(d) + p4(e))] = true;
    return b;
}

inline std::vector<long long> representable(long long limit) {
    const auto b = representable_bitmap(limit);
    std::vector<long long> v;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i]) v.push_back(static_cast<long long>(i));
    return v;
}

/// n in (N/2, N] with no representable m in (n - Y, n].
inline long long kprime(long long N, long double Y) {
    const auto b = representable_bitmap(N);
    long long count = 0;
    for (long long n = N / 2 + 1; n <= N; ++n) {
        bool hit = false;
        for (long long m = n; m >= 1 && static_cast<long double>(m) > static_cast<long double>(n) - Y; --m)
            if (b[static_cast<std::size_t>(m)]) hit = true;
        if (!hit) ++count;
    }
    return count;
}

/// n in [1, N] with no representable m in (n - n^gamma, n].
inline long long kgamma(long long N, long double gamma) {
    const auto b = representable_bitmap(N);
    long long count = 0;
    for (long long n = 1; n <= N; ++n) {
        const long double lo = static_cast<long double>(n) - std::pow(static_cast<long double>(n), gamma);
        bool hit = false;
        for (long long m = n; m >= 1 && static_cast<long double>(m) > lo; --m)
            if (b[static_cast<std::size_t>(m)]) hit = true;
        if (!hit) ++count;
    }
    return count;
}

/// Exact floor of the fourth root by bisection on big integers.
inline BigInt iroot4(const BigInt& n) {
    BigInt lo = 0, hi = 1;
    while (hi * hi * hi * hi <= n) hi *= 2;
    while (hi - lo > 1) {
        const BigInt mid = (lo + hi) / 2;
        if (mid * mid * mid * mid <= n) lo = mid;
        else hi = mid;
    }
    return lo;
}

/// R(n) by five nested loops.
inline long long R(long long n, const std::vector<long double>& P, long double Y) {
    long long c = 0;
    for (long long a : xs(P[0]))
        for (long long b : xs(P[1]))
            for (long long d : xs(P[2]))
                for (long long e : xs(P[3]))
                    for (long long y : ys(Y))
                        if (p4(a) + p4(b) + p4(d) + p4(e) + y == n) ++c;
    return c;
}

/// r(n, X): pairs with x'^4 - x^4 = n.
inline long long r(long long n, long double X) {
    long long c = 0;
    for (long long x : xs(X))
        for (long long xp : xs(X))
            if (p4(xp) - p4(x) == n) ++c;
    return c;
}

/// r'(n): (h, x) with (x+h)^4 - x^4 = n, 1 <= h <= hmax, x + h in range.
inline long long r_prime(long long n, long double X, long long hmax) {
    const auto v = xs(X);
    long long c = 0;
    for (long long h = 1; h <= hmax; ++h)
        for (long long x : v)
            if (x + h <= v.back() && p4(x + h) - p4(x) == n) ++c;
    return c;
}

/// rho(n) from the weighted distribution of z2 + z3 + z4, direct double loop.
inline long double rho(long long n, long double P2, long double P3, long double P4) {
    std::map<long long, long double> D;
    for (long long a : zs(P2))
        for (long long b : zs(P3))
            for (long long c : zs(P4))
                D[a + b + c] += std::pow(static_cast<long double>(a) * b * c, -0.75L) / 64;
    long double s = 0;
    for (const auto& [k, v] : D) {
        auto it = D.find(k - n);
        if (it != D.end()) s += v * it->second;
    }
    return s;
}

/// Multiset of sum_{i >= j} x_i^4 + y over all tuples.
inline std::vector<long long> tuple_sums(const std::vector<long double>& P, long double Y, int j) {
    std::vector<long long> sums{0};
    for (int i = j; i <= 4; ++i) {
        std::vector<long long> next;
        for (long long s : sums)
            for (long long x : xs(P[static_cast<std::size_t>(i - 1)])) next.push_back(s + p4(x));
        sums = next;
    }
    std::vector<long long> out;
    for (long long s : sums)
        for (long long y : ys(Y)) out.push_back(s + y);
    return out;
}

/// S^(j) by comparing every pair of tuples.
inline long long S(const std::vector<long double>& P, long double Y, int j) {
    const auto t = tuple_sums(P, Y, j);
    long long c = 0;
    for (long long a : t)
        for (long long b : t)
            if (a == b) ++c;
    return c;
}

/// T^(j): (x, h) with 1 <= h <= Z, x + h in range, and pairs of tuples for
/// the remaining variables with (x+h)^4 - x^4 = rest' - rest.
inline long long T(const std::vector<long double>& P, long double Y, int j, long double Z) {
    const auto t = tuple_sums(P, Y, j + 1);
    const auto v = xs(P[static_cast<std::size_t>(j - 1)]);
    long long c = 0;
    for (long long h = 1; static_cast<long double>(h) <= Z; ++h)
        for (long long x : v) {
            if (x + h > v.back()) continue;
            const long long d = p4(x + h) - p4(x);
            for (long long a : t)
                for (long long b : t)
                    if (b - a == d) ++c;
        }
    return c;
}

}  // namespace oracle
