// The exponential sums f, g, nu, H and the counting functions r, r', rho.
//
// Every phase alpha*m is reduced mod 1 in integer arithmetic (TorusPoint::phase)
// before the complex exponential is taken. Sums are accumulated in fixed
// blocks of consecutive terms and the block results combined pairwise, so a
// value never depends on the thread count.
#pragma once

#include "waring4/int128.hpp"
#include "waring4/parallel.hpp"
#include "waring4/params.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace waring4 {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest X accepted by the biquadratic sums: keeps x^4 below 2^63.
inline constexpr double kMaxWeylX = 55000.0;

/// Direct-summation budget for nu and rho.
inline constexpr std::uint64_t kDefaultTermBudget = 1'000'000'000ull;

/// e(theta) = exp(2 pi i theta).
inline cplx unit_exp(double theta) {
    const double t = theta - std::round(theta);
    return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

/// e(theta) - 1, accurate for small theta.
inline cplx unit_exp_minus_one(double theta) {
    const double t = theta - std::round(theta);
    const double s = std::sin(std::numbers::pi * t);
    return {-2.0 * s * s, std::sin(kTwoPi * t)};
}

struct ValueAndDerivative {
    cplx value;
    cplx derivative;  // d/d alpha
};

namespace detail {

inline void require_weyl_x(double X, const char* who) {
    if (!(X >= 2) || !std::isfinite(X)) throw std::invalid_argument(std::string(who) + ": X must be >= 2");
    if (X > kMaxWeylX) throw BudgetExceeded(std::string(who) + ": X exceeds " + decimal(kMaxWeylX));
}

inline std::size_t as_count(std::int64_t n) { return n > 0 ? static_cast<std::size_t>(n) : 0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// f(alpha, X) = sum_{X/2 < x <= X} e(alpha x^4)

inline ValueAndDerivative weyl_f_with_derivative(const TorusPoint& alpha, double X, const Exec& exec = {}) {
    detail::require_weyl_x(X, "weyl_f");
    const LatticeRange xr = x_range_of(X);
    const std::int64_t x0 = xr.first();
    struct Pair {
        cplx v, d;
        Pair& operator+=(const Pair& o) { v += o.v; d += o.d; return *this; }
        Pair operator+(const Pair& b) const { Pair a = *this; return a += b; }
    };
    const Pair s = blocked_sum<Pair>(detail::as_count(xr.count()), exec, [&](std::size_t b, std::size_t e) {
        Pair acc{};
        for (std::size_t i = b; i < e; ++i) {
            const u128 m = pow4(static_cast<std::uint64_t>(x0) + i);
            const cplx t = unit_exp(alpha.phase(static_cast<i128>(m)));
            acc.v += t;
            acc.d += static_cast<double>(m) * t;
        }
        return acc;
    });
    return {s.v, cplx(0, kTwoPi) * s.d};
}

inline cplx weyl_f(const TorusPoint& alpha, double X, const Exec& exec = {}) {
    detail::require_weyl_x(X, "weyl_f");
    const LatticeRange xr = x_range_of(X);
    const std::int64_t x0 = xr.first();
    return blocked_sum<cplx>(detail::as_count(xr.count()), exec, [&](std::size_t b, std::size_t e) {
        cplx acc{};
        for (std::size_t i = b; i < e; ++i)
            acc += unit_exp(alpha.phase(static_cast<i128>(pow4(static_cast<std::uint64_t>(x0) + i))));
        return acc;
    });
}

// ---------------------------------------------------------------------------
// g(alpha, Y) = sum_{0 <= y < Y} e(alpha y)

inline cplx weyl_g(const TorusPoint& alpha, double Y) {
    if (!(Y >= 1) || !std::isfinite(Y)) throw std::invalid_argument("weyl_g: Y must be >= 1");
    const std::int64_t L = y_count_of(Y);
    if (alpha.is_zero()) return {static_cast<double>(L), 0.0};
    // (e(alpha L) - 1) / (e(alpha) - 1) = sin(pi tL)/sin(pi t1) * e((tL - t1)/2)
    const double tL = alpha.phase(L);
    const double t1 = alpha.phase(1);
    if (t1 == 0.0) return {static_cast<double>(L), 0.0};
    const double ratio = std::sin(std::numbers::pi * tL) / std::sin(std::numbers::pi * t1);
    const double half = 0.5 * (tL - t1);
    return {ratio * std::cos(kTwoPi * half), ratio * std::sin(kTwoPi * half)};
}

// ---------------------------------------------------------------------------
// nu(alpha, X) = sum_{X^4/16 < z <= X^4} (1/4) z^{-3/4} e(alpha z)

/// nu and its derivative at many points in one pass over z. Weights are
/// computed once per block and shared by all points.
inline std::vector<ValueAndDerivative> mollified_nu_many(std::span<const TorusPoint> alphas, double X,
                                                         const Exec& exec = {}, bool with_derivative = false,
                                                         std::uint64_t max_terms = kDefaultTermBudget) {
    detail::require_weyl_x(X, "mollified_nu");
    const LatticeRange zr = z_range_of(X);
    const std::int64_t z0 = zr.first();
    const std::size_t n_terms = detail::as_count(zr.count());
    if (n_terms > max_terms)
        throw BudgetExceeded("mollified_nu: " + std::to_string(n_terms) + " terms exceed the budget of " +
                             std::to_string(max_terms));
    const std::size_t na = alphas.size();
    std::vector<ValueAndDerivative> out(na);
    if (na == 0) return out;
    const std::size_t B = kReductionBlock;
    const std::size_t blocks = (n_terms + B - 1) / B;

    // steps[a][k] = e(alpha_a k), k < B, each from an exact phase.
    std::vector<cplx> steps(na * B);
    parallel_for(na, exec, [&](std::size_t a) {
        for (std::size_t k = 0; k < B; ++k) steps[a * B + k] = unit_exp(alphas[a].phase(static_cast<i128>(k)));
    });

    std::vector<cplx> val(blocks * na), der(with_derivative ? blocks * na : 0);
    parallel_for(blocks, exec, [&](std::size_t blk) {
        const std::size_t begin = blk * B, end = std::min(n_terms, begin + B);
        const std::size_t len = end - begin;
        const std::int64_t zb = z0 + static_cast<std::int64_t>(begin);
        double w[kReductionBlock];
        for (std::size_t k = 0; k < len; ++k) w[k] = 0.25 * std::pow(static_cast<double>(zb + static_cast<std::int64_t>(k)), -0.75);
        for (std::size_t a = 0; a < na; ++a) {
            const cplx base = unit_exp(alphas[a].phase(zb));
            const cplx* st = &steps[a * B];
            double vr = 0, vi = 0, dr = 0, di = 0;
            for (std::size_t k = 0; k < len; ++k) {
                const double tr = base.real() * st[k].real() - base.imag() * st[k].imag();
                const double ti = base.real() * st[k].imag() + base.imag() * st[k].real();
                vr += w[k] * tr;
                vi += w[k] * ti;
                if (with_derivative) {
                    const double wz = w[k] * static_cast<double>(zb + static_cast<std::int64_t>(k));
                    dr += wz * tr;
                    di += wz * ti;
                }
            }
            val[blk * na + a] = {vr, vi};
            if (with_derivative) der[blk * na + a] = {dr, di};
        }
    });

    std::vector<cplx> column(blocks);
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < blocks; ++b) column[b] = val[b * na + a];
        out[a].value = pairwise_sum(column.data(), blocks);
        if (with_derivative) {
            for (std::size_t b = 0; b < blocks; ++b) column[b] = der[b * na + a];
            out[a].derivative = cplx(0, kTwoPi) * pairwise_sum(column.data(), blocks);
        }
    }
    return out;
}

inline cplx mollified_nu(const TorusPoint& alpha, double X, const Exec& exec = {},
                         std::uint64_t max_terms = kDefaultTermBudget) {
    return mollified_nu_many(std::span<const TorusPoint>(&alpha, 1), X, exec, false, max_terms)[0].value;
}

// ---------------------------------------------------------------------------
// H(alpha, X, Z) = sum_{1 <= h <= Z} sum_{X/2 < x <= X - h} e(alpha ((x+h)^4 - x^4))

inline u128 difference_poly(std::uint64_t x, std::uint64_t h) { return pow4(x + h) - pow4(x); }

/// The (h, x) lattice of H: h = 1..floor(Z), x = first..last-h.
struct ShiftLattice {
    std::int64_t x_first = 0, x_last = 0, h_max = 0;
    std::vector<std::size_t> offsets;  // offsets[h-1] = index of (h, x_first)

    ShiftLattice(double X, double Z) {
        const LatticeRange xr = x_range_of(X);
        x_first = xr.first();
        x_last = xr.last();
        h_max = Z >= 1 ? static_cast<std::int64_t>(std::floor(Z)) : 0;
        h_max = std::min(h_max, std::max<std::int64_t>(0, x_last - x_first));
        offsets.resize(static_cast<std::size_t>(h_max) + 1, 0);
        for (std::int64_t h = 1; h <= h_max; ++h)
            offsets[static_cast<std::size_t>(h)] = offsets[static_cast<std::size_t>(h - 1)] + row(h);
    }
    std::size_t row(std::int64_t h) const { return detail::as_count(x_last - h - x_first + 1); }
    std::size_t size() const { return offsets.back(); }

    /// Calls fn(x, h) for flattened indices [begin, end) in ascending order.
    template <class Fn>
    void visit(std::size_t begin, std::size_t end, Fn&& fn) const {
        if (begin >= end) return;
        auto it = std::upper_bound(offsets.begin(), offsets.end(), begin);
        std::int64_t h = it - offsets.begin();
        std::size_t i = begin;
        while (i < end) {
            const std::size_t row_end = std::min(end, offsets[static_cast<std::size_t>(h)]);
            for (; i < row_end; ++i) {
                const std::int64_t x = x_first + static_cast<std::int64_t>(i - offsets[static_cast<std::size_t>(h - 1)]);
                fn(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(h));
            }
            ++h;
        }
    }
};

inline cplx diff_sum_H(const TorusPoint& alpha, double X, double Z, const Exec& exec = {}) {
    detail::require_weyl_x(X, "diff_sum_H");
    if (!(Z >= 0) || !std::isfinite(Z)) throw std::invalid_argument("diff_sum_H: Z must be >= 0");
    const ShiftLattice lat(X, Z);
    return blocked_sum<cplx>(lat.size(), exec, [&](std::size_t b, std::size_t e) {
        cplx acc{};
        lat.visit(b, e, [&](std::uint64_t x, std::uint64_t h) {
            acc += unit_exp(alpha.phase(static_cast<i128>(difference_poly(x, h))));
        });
        return acc;
    });
}

// ---------------------------------------------------------------------------
// Counting functions

/// r(n, X) = #{(x, x') in (X/2, X]^2 : x'^4 - x^4 = n}
inline std::uint64_t count_r(std::int64_t n, double X) {
    detail::require_weyl_x(X, "count_r");
    const LatticeRange xr = x_range_of(X);
    std::uint64_t c = 0;
    for (std::int64_t x = xr.first(); x <= xr.last(); ++x) {
        const i128 v = static_cast<i128>(pow4(static_cast<std::uint64_t>(x))) + n;
        if (v <= 0) continue;
        const std::uint64_t xp = iroot4(static_cast<u128>(v));
        if (pow4(xp) == static_cast<u128>(v) && static_cast<std::int64_t>(xp) >= xr.first() &&
            static_cast<std::int64_t>(xp) <= xr.last())
            ++c;
    }
    return c;
}

/// Largest shift h counted by r'(n): floor(c_h P1^-3 P2^4).
inline std::int64_t r_prime_h_max(const Parameters& P) {
    return static_cast<std::int64_t>(std::floor(P.shift_bound(1)));
}

/// r'(n) = #{(h, x) : (x+h)^4 - x^4 = n, 1 <= h <= c_h P1^-3 P2^4, P1/2 < x, x+h <= P1}
inline std::uint64_t count_r_prime(std::int64_t n, const Parameters& P) {
    if (n < 1) throw std::invalid_argument("count_r_prime: n must be positive");
    const LatticeRange xr = P.x_range(1);
    const std::int64_t h_max = r_prime_h_max(P);
    std::uint64_t c = 0;
    for (std::int64_t x = xr.first(); x <= xr.last(); ++x) {
        const u128 v = pow4(static_cast<std::uint64_t>(x)) + static_cast<u128>(n);
        const std::uint64_t xp = iroot4(v);
        if (pow4(xp) != v) continue;
        const std::int64_t h = static_cast<std::int64_t>(xp) - x;
        if (h >= 1 && h <= h_max && static_cast<std::int64_t>(xp) <= xr.last()) ++c;
    }
    return c;
}

namespace detail {

/// Full linear convolution of a and b; every output is summed in ascending
/// index order.
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, const Exec& exec) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1);
    const std::size_t chunk = 1024;
    parallel_for((out.size() + chunk - 1) / chunk, exec, [&](std::size_t c) {
        const std::size_t kb = c * chunk, ke = std::min(out.size(), kb + chunk);
        for (std::size_t k = kb; k < ke; ++k) {
            const std::size_t i_lo = k >= b.size() - 1 ? k - (b.size() - 1) : 0;
            const std::size_t i_hi = std::min(k, a.size() - 1);
            double s = 0;
            for (std::size_t i = i_lo; i <= i_hi; ++i) s += a[i] * b[k - i];
            out[k] = s;
        }
    });
    return out;
}

inline std::vector<double> nu_weights(double X) {
    const LatticeRange zr = z_range_of(X);
    std::vector<double> w(as_count(zr.count()));
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 0.25 * std::pow(static_cast<double>(zr.first() + static_cast<std::int64_t>(i)), -0.75);
    return w;
}

}  // namespace detail

/// rho(n) = 4^-6 sum (z2 z2' z3 z3' z4 z4')^{-3/4} over z_j, z_j' in
/// (P_j^4/16, P_j^4] with z2+z3+z4 - z2'-z3'-z4' = n.
/// Built once from D = w2 * w3 * w4 (the weighted distribution of z2+z3+z4);
/// rho(n) = sum_s D(s) D(s - n).
class RhoTable {
public:
    RhoTable(const Parameters& P, const Exec& exec = {}, std::uint64_t max_terms = kDefaultTermBudget) {
        std::vector<double> w2 = detail::nu_weights(P.P(2));
        std::vector<double> w3 = detail::nu_weights(P.P(3));
        std::vector<double> w4 = detail::nu_weights(P.P(4));
        const double work = static_cast<double>(w2.size()) * static_cast<double>(w3.size()) +
                            static_cast<double>(w2.size() + w3.size()) * static_cast<double>(w4.size());
        if (work > static_cast<double>(max_terms))
            throw BudgetExceeded("rho: convolution work of " + decimal(work) + " terms exceeds the budget");
        s_min_ = P.z_range(2).first() + P.z_range(3).first() + P.z_range(4).first();
        D_ = detail::convolve(detail::convolve(w2, w3, exec), w4, exec);
        if (static_cast<double>(D_.size()) > static_cast<double>(max_terms))
            throw BudgetExceeded("rho: table exceeds the budget");
    }

    /// n with rho(n) possibly nonzero satisfy |n| <= span().
    std::int64_t span() const { return D_.empty() ? -1 : static_cast<std::int64_t>(D_.size()) - 1; }

    double operator()(std::int64_t n) const {
        const std::int64_t len = static_cast<std::int64_t>(D_.size());
        const std::int64_t m = n < 0 ? -n : n;  // rho is even
        if (m >= len) return 0.0;
        double s = 0;
        for (std::int64_t i = m; i < len; ++i) s += D_[static_cast<std::size_t>(i)] * D_[static_cast<std::size_t>(i - m)];
        return s;
    }

    const std::vector<double>& distribution() const { return D_; }
    std::int64_t distribution_offset() const { return s_min_; }

private:
    std::vector<double> D_;
    std::int64_t s_min_ = 0;
};

inline double count_rho(std::int64_t n, const Parameters& P, const Exec& exec = {}) {
    return RhoTable(P, exec)(n);
}

}  // namespace waring4
