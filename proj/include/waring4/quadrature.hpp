// Integration of products of exponential sums over arc sets.
//
// Two engines:
//  * spectral  - exact Fourier coefficients c_m of the integrand from an
//                alias-free grid, then sum_m c_m * integral_B e((m - n) alpha),
//                the latter in closed form on every interval of B;
//  * gauss_kronrod - adaptive Gauss-Kronrod panels (bisection, relative
//                tolerance) on the integrand evaluated by direct sums; also
//                handles integrands that are not trigonometric polynomials.
#pragma once

#include "waring4/arcs.hpp"
#include "waring4/parallel.hpp"
#include "waring4/trigpoly.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace waring4 {

enum class Engine { spectral, gauss_kronrod };

inline const char* to_string(Engine e) { return e == Engine::spectral ? "spectral" : "gauss-kronrod"; }

struct QuadOptions {
    Engine engine = Engine::spectral;
    double rel_tol = 1e-8;
    /// Bisection depth per panel; tolerances below the round-off floor of a
    /// panel would otherwise cost 2^depth evaluations.
    unsigned max_depth = 15;
    /// Gauss-Kronrod panels are at most this many periods of the highest
    /// frequency wide.
    double periods_per_panel = 4.0;
    GridOptions grid{};
};

struct IntegralResult {
    cplx value;
    double error_estimate = 0;
    std::uint64_t grid_size = 0;   // 0 when no grid was used
    std::size_t panels = 0;        // Gauss-Kronrod panels, 0 otherwise
    std::string engine;
};

/// An interval of an arc set converted once for repeated closed-form use.
struct IntervalPhase {
    double length;
    TorusPoint lo;     // the left end as a torus point
    TorusPoint width;  // the length as a torus point
};

inline std::vector<IntervalPhase> interval_phases(const ArcSet& B) {
    std::vector<IntervalPhase> v;
    for (const Interval& iv : B.intervals) {
        const double w = iv.length().to_double();
        v.push_back({w, TorusPoint::from_double(iv.lo.to_double()), TorusPoint::from_double(w)});
    }
    return v;
}

/// integral over B of e(k alpha) d alpha.
inline cplx indicator_coefficient(const std::vector<IntervalPhase>& B, std::int64_t k) {
    cplx s{};
    if (k == 0) {
        for (const IntervalPhase& iv : B) s += iv.length;
        return s;
    }
    const double inv = 1.0 / (kTwoPi * static_cast<double>(k));
    for (const IntervalPhase& iv : B) {
        // e(k lo) (e(k w) - 1) / (2 pi i k)
        const cplx d = unit_exp(iv.lo.phase(k)) * unit_exp_minus_one(iv.width.phase(k));
        s += cplx(d.imag() * inv, -d.real() * inv);
    }
    return s;
}

/// integral over B of e(-n alpha) G(alpha), G given by its coefficients.
inline IntegralResult spectral_integral(const CoefficientTable& table, std::int64_t n, const ArcSet& B,
                                        const Exec& exec = {}) {
    IntegralResult r;
    r.engine = to_string(Engine::spectral);
    r.grid_size = table.grid_size;
    const std::vector<IntervalPhase> iv = interval_phases(B);
    const std::size_t count = table.values.size();
    struct Acc {
        cplx v;
        double l1;
        Acc& operator+=(const Acc& o) { v += o.v; l1 += o.l1; return *this; }
        Acc operator+(const Acc& b) const { Acc a = *this; return a += b; }
    };
    const Acc s = blocked_sum<Acc>(count, exec, [&](std::size_t b, std::size_t e) {
        Acc acc{{}, 0};
        for (std::size_t i = b; i < e; ++i) {
            const cplx c = table.values[i];
            if (c == cplx{}) continue;
            const std::int64_t m = table.lo + static_cast<std::int64_t>(i);
            acc.v += c * indicator_coefficient(iv, m - n);
            acc.l1 += std::abs(c);
        }
        return acc;
    });
    r.value = s.v;
    const double measure = B.measure().to_double();
    r.error_estimate = table.error_estimate * (static_cast<double>(count) * measure + 1.0) +
                       8.0 * std::numeric_limits<double>::epsilon() * s.l1 * static_cast<double>(iv.size() + 1);
    return r;
}

/// Adaptive Gauss-Kronrod over every interval of B, each interval first cut
/// into panels no wider than `max_panel`.
template <class Fn>
IntegralResult gauss_kronrod_integral(Fn&& fn, const ArcSet& B, double max_panel, const QuadOptions& opts,
                                      const Exec& exec = {}) {
    struct Panel {
        double a, b;
    };
    std::vector<Panel> panels;
    for (const Interval& iv : B.intervals) {
        const double a = iv.lo.to_double(), b = iv.hi.to_double();
        if (!(b > a)) continue;
        const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_panel)));
        for (std::size_t i = 0; i < k; ++i)
            panels.push_back({a + (b - a) * static_cast<double>(i) / static_cast<double>(k),
                              i + 1 == k ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(k)});
    }
    std::vector<cplx> values(panels.size());
    std::vector<double> errors(panels.size());
    parallel_for(panels.size(), exec, [&](std::size_t i) {
        double err = 0, l1 = 0;
        values[i] = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double x) -> cplx { return fn(x); }, panels[i].a, panels[i].b, opts.max_depth, opts.rel_tol, &err, &l1);
        errors[i] = err;
    });
    IntegralResult r;
    r.engine = to_string(Engine::gauss_kronrod);
    r.panels = panels.size();
    r.value = pairwise_sum(values.data(), values.size());
    r.error_estimate = pairwise_sum(errors.data(), errors.size());
    return r;
}

/// integral over B of e(-n alpha) * spec(alpha).
inline IntegralResult integrate_product(const ProductSpec& spec, std::int64_t n, const ArcSet& B,
                                        const QuadOptions& opts = {}) {
    if (B.kind == ArcKind::full_torus) {
        const CoefficientTable t = fourier_coefficients(spec, opts.grid, n);
        IntegralResult r;
        r.engine = "grid";
        r.value = t.at(n);
        r.grid_size = t.grid_size;
        r.error_estimate = t.error_estimate;
        return r;
    }
    if (opts.engine == Engine::spectral) return spectral_integral(fourier_coefficients(spec, opts.grid), n, B, opts.grid.exec);
    const FrequencySpan s = support_of(spec);
    const double band = static_cast<double>(std::max<std::int64_t>({std::abs(s.lo - n), std::abs(s.hi - n), 1}));
    return gauss_kronrod_integral(
        [&](double a) {
            const TorusPoint t = TorusPoint::from_double(a);
            return spec.evaluate(t) * unit_exp(-t.phase(n));
        },
        B, opts.periods_per_panel / band, opts, opts.grid.exec);
}

}  // namespace waring4
