// Lattice trigonometric polynomials and exact Fourier-coefficient extraction
// on a uniform grid.
//
// A product of trigonometric polynomials whose frequencies lie in [lo, hi]
// is sampled at M > hi - lo equally spaced points of the torus. The grid
// average of G(k/M) e(-n k/M) then equals the n-th Fourier coefficient of G
// exactly (no aliasing), so orthogonality identities become exact equalities
// up to floating-point rounding.
#pragma once

#include "waring4/params.hpp"
#include "waring4/weyl.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waring4 {

struct Term {
    std::int64_t freq;
    cplx weight;
};

/// sum_m c_m e(m alpha), stored as sorted, merged (frequency, weight) pairs.
class TrigPoly {
public:
    TrigPoly() = default;
    explicit TrigPoly(std::vector<Term> terms) : terms_(std::move(terms)) {
        std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.freq < b.freq; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (out > 0 && terms_[out - 1].freq == terms_[i].freq) terms_[out - 1].weight += terms_[i].weight;
            else terms_[out++] = terms_[i];
        }
        terms_.resize(out);
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::int64_t lo() const { return terms_.empty() ? 0 : terms_.front().freq; }
    std::int64_t hi() const { return terms_.empty() ? 0 : terms_.back().freq; }

    /// sum |c_m|, an upper bound for the sup norm.
    double l1_norm() const {
        double s = 0;
        for (const Term& t : terms_) s += std::abs(t.weight);
        return s;
    }

    /// Direct evaluation with exact phases.
    cplx operator()(const TorusPoint& alpha) const {
        cplx s{};
        for (const Term& t : terms_) s += t.weight * unit_exp(alpha.phase(t.freq));
        return s;
    }

private:
    std::vector<Term> terms_;
};

inline TrigPoly trig_f(double X) {
    detail::require_weyl_x(X, "trig_f");
    const LatticeRange xr = x_range_of(X);
    std::vector<Term> t;
    for (std::int64_t x = xr.first(); x <= xr.last(); ++x)
        t.push_back({static_cast<std::int64_t>(pow4(static_cast<std::uint64_t>(x))), 1.0});
    return TrigPoly(std::move(t));
}

inline TrigPoly trig_g(double Y) {
    if (!(Y >= 1) || !std::isfinite(Y)) throw std::invalid_argument("trig_g: Y must be >= 1");
    std::vector<Term> t;
    for (std::int64_t y = 0; y < y_count_of(Y); ++y) t.push_back({y, 1.0});
    return TrigPoly(std::move(t));
}

inline TrigPoly trig_nu(double X, std::uint64_t max_terms = kDefaultTermBudget) {
    detail::require_weyl_x(X, "trig_nu");
    const LatticeRange zr = z_range_of(X);
    if (static_cast<std::uint64_t>(std::max<std::int64_t>(0, zr.count())) > max_terms)
        throw BudgetExceeded("trig_nu: term count exceeds the budget");
    std::vector<Term> t;
    t.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, zr.count())));
    for (std::int64_t z = zr.first(); z <= zr.last(); ++z)
        t.push_back({z, 0.25 * std::pow(static_cast<double>(z), -0.75)});
    return TrigPoly(std::move(t));
}

inline TrigPoly trig_H(double X, double Z) {
    detail::require_weyl_x(X, "trig_H");
    if (!(Z >= 0) || !std::isfinite(Z)) throw std::invalid_argument("trig_H: Z must be >= 0");
    const ShiftLattice lat(X, Z);
    std::vector<Term> t;
    t.reserve(lat.size());
    lat.visit(0, lat.size(), [&](std::uint64_t x, std::uint64_t h) {
        t.push_back({static_cast<std::int64_t>(difference_poly(x, h)), 1.0});
    });
    return TrigPoly(std::move(t));
}

// ---------------------------------------------------------------------------
// Products of sums

enum class SumKind { f, g, nu, H };
enum class Mode { plain, conj, abs2 };

inline const char* to_string(SumKind k) {
    switch (k) {
        case SumKind::f: return "f";
        case SumKind::g: return "g";
        case SumKind::nu: return "nu";
        case SumKind::H: return "H";
    }
    return "?";
}

/// One factor of an integrand: a sum with its size parameter (X, or Y for g),
/// the shift bound Z (H only), and how it enters the product.
struct Factor {
    SumKind kind = SumKind::f;
    double x = 2;
    double z = 0;
    Mode mode = Mode::plain;

    TrigPoly poly() const {
        switch (kind) {
            case SumKind::f: return trig_f(x);
            case SumKind::g: return trig_g(x);
            case SumKind::nu: return trig_nu(x);
            case SumKind::H: return trig_H(x, z);
        }
        throw std::logic_error("unknown sum kind");
    }

    /// Value at alpha, computed by the direct sums (not the grid).
    cplx evaluate(const TorusPoint& alpha, const Exec& exec = {}) const {
        cplx v;
        switch (kind) {
            case SumKind::f: v = weyl_f(alpha, x, exec); break;
            case SumKind::g: v = weyl_g(alpha, x); break;
            case SumKind::nu: v = mollified_nu(alpha, x, exec); break;
            case SumKind::H: v = diff_sum_H(alpha, x, z, exec); break;
        }
        switch (mode) {
            case Mode::plain: return v;
            case Mode::conj: return std::conj(v);
            case Mode::abs2: return std::norm(v);
        }
        return v;
    }

    std::string describe() const {
        std::string s = to_string(kind);
        s += "(" + decimal(x);
        if (kind == SumKind::H) s += "," + decimal(z);
        s += ")";
        if (mode == Mode::conj) s = "conj " + s;
        if (mode == Mode::abs2) s = "|" + s + "|^2";
        return s;
    }
};

struct ProductSpec {
    std::vector<Factor> factors;
    double scale = 1.0;

    std::string describe() const {
        std::string s = decimal(scale);
        for (const Factor& f : factors) s += " * " + f.describe();
        return s;
    }

    cplx evaluate(const TorusPoint& alpha, const Exec& exec = {}) const {
        cplx v = scale;
        for (const Factor& f : factors) v *= f.evaluate(alpha, exec);
        return v;
    }
};

struct FrequencySpan {
    std::int64_t lo = 0, hi = 0;
};

inline FrequencySpan span_of(const TrigPoly& p, Mode mode) {
    switch (mode) {
        case Mode::plain: return {p.lo(), p.hi()};
        case Mode::conj: return {-p.hi(), -p.lo()};
        case Mode::abs2: return {-(p.hi() - p.lo()), p.hi() - p.lo()};
    }
    return {};
}

/// Smallest power of two strictly greater than `width`.
inline std::uint64_t grid_size_above(std::uint64_t width) {
    std::uint64_t m = 1;
    while (m <= width) m <<= 1;
    return m;
}

inline constexpr std::uint64_t kDefaultMaxGrid = std::uint64_t{1} << 25;

struct GridOptions {
    std::uint64_t max_grid = kDefaultMaxGrid;
    Exec exec{};
};

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftwBuffer fftw_buffer(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (p == nullptr) throw BudgetExceeded("grid: cannot allocate " + std::to_string(n) + " points");
    return FftwBuffer(p);
}

/// In-place DFT; sign = FFTW_FORWARD computes sum_k a_k e(-jk/M),
/// FFTW_BACKWARD sum_k a_k e(+jk/M).
inline void fft_inplace(fftw_complex* data, std::size_t n, int sign) {
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), data, data, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
    fftw_execute(plan);
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
}

inline std::size_t grid_index(std::int64_t freq, std::uint64_t M) {
    const std::int64_t m = static_cast<std::int64_t>(M);
    std::int64_t r = freq % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

}  // namespace detail

/// Values of the product (scale * prod factors) at alpha = k/M, k = 0..M-1.
class GridSamples {
public:
    GridSamples(const ProductSpec& spec, std::uint64_t M, const Exec& exec = {}) : M_(M) {
        if (M == 0 || (M & (M - 1)) != 0) throw std::invalid_argument("grid: size must be a power of two");
        const std::size_t n = static_cast<std::size_t>(M);
        acc_ = detail::fftw_buffer(n);
        for (std::size_t k = 0; k < n; ++k) {
            acc_[k][0] = spec.scale;
            acc_[k][1] = 0;
        }
        l1_bound_ = std::abs(spec.scale);
        detail::FftwBuffer buf = detail::fftw_buffer(n);
        const std::size_t chunk = 1 << 16;
        const std::size_t chunks = (n + chunk - 1) / chunk;
        for (const Factor& f : spec.factors) {
            const TrigPoly p = f.poly();
            std::fill_n(&buf[0][0], 2 * n, 0.0);
            for (const Term& t : p.terms()) {
                const std::size_t i = detail::grid_index(t.freq, M);
                buf[i][0] += t.weight.real();
                buf[i][1] += t.weight.imag();
            }
            detail::fft_inplace(buf.get(), n, FFTW_BACKWARD);
            const double l1 = p.l1_norm();
            l1_bound_ *= f.mode == Mode::abs2 ? l1 * l1 : l1;
            parallel_for(chunks, exec, [&](std::size_t c) {
                const std::size_t kb = c * chunk, ke = std::min(n, kb + chunk);
                for (std::size_t k = kb; k < ke; ++k) {
                    cplx v(buf[k][0], buf[k][1]);
                    if (f.mode == Mode::conj) v = std::conj(v);
                    else if (f.mode == Mode::abs2) v = std::norm(v);
                    const cplx a = cplx(acc_[k][0], acc_[k][1]) * v;
                    acc_[k][0] = a.real();
                    acc_[k][1] = a.imag();
                }
            });
        }
    }

    std::uint64_t size() const { return M_; }
    cplx operator[](std::size_t k) const { return {acc_[k][0], acc_[k][1]}; }
    /// Product of the factors' coefficient l1 norms times |scale|.
    double l1_bound() const { return l1_bound_; }

    /// (1/M) sum_k phi(G(k/M)) with a fixed pairwise summation order.
    template <class Fn>
    double mean_of(Fn&& phi, const Exec& exec = {}) const {
        const std::size_t n = static_cast<std::size_t>(M_);
        const double s = blocked_sum<double>(n, exec, [&](std::size_t b, std::size_t e) {
            double acc = 0;
            for (std::size_t k = b; k < e; ++k) acc += phi(cplx(acc_[k][0], acc_[k][1]));
            return acc;
        });
        return s / static_cast<double>(M_);
    }

    /// Forward transform in place: afterwards operator[](j) holds
    /// (1/M) sum_k G(k/M) e(-jk/M).
    void to_coefficients() {
        const std::size_t n = static_cast<std::size_t>(M_);
        detail::fft_inplace(acc_.get(), n, FFTW_FORWARD);
        const double inv = 1.0 / static_cast<double>(M_);
        for (std::size_t k = 0; k < n; ++k) {
            acc_[k][0] *= inv;
            acc_[k][1] *= inv;
        }
    }

private:
    std::uint64_t M_;
    detail::FftwBuffer acc_;
    double l1_bound_ = 0;
};

/// Fourier coefficients of a product over its frequency support [lo, hi].
struct CoefficientTable {
    std::int64_t lo = 0, hi = -1;
    std::uint64_t grid_size = 0;
    std::vector<cplx> values;  // values[n - lo]
    double error_estimate = 0;

    cplx at(std::int64_t n) const {
        if (n < lo || n > hi) return {};
        return values[static_cast<std::size_t>(n - lo)];
    }
};

inline FrequencySpan support_of(const ProductSpec& spec) {
    FrequencySpan s{0, 0};
    for (const Factor& f : spec.factors) {
        const FrequencySpan fs = span_of(f.poly(), f.mode);
        s.lo += fs.lo;
        s.hi += fs.hi;
    }
    return s;
}

namespace detail {

inline double grid_error_estimate(double l1_bound, std::uint64_t M, std::size_t factors) {
    const double log_m = std::log2(static_cast<double>(std::max<std::uint64_t>(M, 2)));
    return 4.0 * std::numeric_limits<double>::epsilon() * log_m * static_cast<double>(factors + 1) * l1_bound;
}

}  // namespace detail

/// All Fourier coefficients of the product; `include` widens the table so
/// that a frequency outside the support is still alias-free.
inline CoefficientTable fourier_coefficients(const ProductSpec& spec, const GridOptions& opts = {},
                                             std::optional<std::int64_t> include = std::nullopt) {
    FrequencySpan s = support_of(spec);
    if (include) {
        s.lo = std::min(s.lo, *include);
        s.hi = std::max(s.hi, *include);
    }
    const std::uint64_t width = static_cast<std::uint64_t>(s.hi - s.lo);
    const std::uint64_t M = grid_size_above(width);
    if (M > opts.max_grid)
        throw BudgetExceeded("grid: " + std::to_string(M) + " points exceed the grid budget of " +
                             std::to_string(opts.max_grid));
    GridSamples g(spec, M, opts.exec);
    g.to_coefficients();
    CoefficientTable t;
    t.lo = s.lo;
    t.hi = s.hi;
    t.grid_size = M;
    t.values.resize(static_cast<std::size_t>(s.hi - s.lo + 1));
    for (std::int64_t n = s.lo; n <= s.hi; ++n) t.values[static_cast<std::size_t>(n - s.lo)] = g[detail::grid_index(n, M)];
    t.error_estimate = detail::grid_error_estimate(g.l1_bound(), M, spec.factors.size());
    return t;
}

}  // namespace waring4
