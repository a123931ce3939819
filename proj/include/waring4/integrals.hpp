// The integrals R, U, S, T, V, W over arc sets, and the generalized
// S^(j), T^(j) of the induction scheme.
//
//   R(n, B) = int_B e(-n a) f1 f2 f3 f4 g
//   U(n, B) = Y int_B e(-n a) nu1 nu2 nu3 nu4
//   S(B)    = int_B |f1 f2 f3 f4 g|^2
//   T(B)    = int_B H1 |f2 f3 f4 g|^2,    H_j = H(a, P_j, c_h P_j^-3 P_{j+1}^4)
//   V(B)    = Y^2 int_B |f1 nu2 nu3 nu4|^2
//   W(B)    = Y^2 int_B H1 |nu2 nu3 nu4|^2
// with f_j = f(a, P_j) and nu_j = nu(a, P_j).
#pragma once

#include "waring4/params.hpp"
#include "waring4/quadrature.hpp"
#include "waring4/trigpoly.hpp"

#include <stdexcept>
#include <string>

namespace waring4 {

inline Factor f_factor(const Parameters& P, int j, Mode m = Mode::plain) { return {SumKind::f, P.P(j), 0, m}; }
inline Factor nu_factor(const Parameters& P, int j, Mode m = Mode::plain) { return {SumKind::nu, P.P(j), 0, m}; }
inline Factor g_factor(const Parameters& P, Mode m = Mode::plain) { return {SumKind::g, P.Y(), 0, m}; }
inline Factor h_factor(const Parameters& P, int j) { return {SumKind::H, P.P(j), P.shift_bound(j), Mode::plain}; }

inline ProductSpec spec_R(const Parameters& P) {
    return {{f_factor(P, 1), f_factor(P, 2), f_factor(P, 3), f_factor(P, 4), g_factor(P)}, 1.0};
}

inline ProductSpec spec_U(const Parameters& P) {
    return {{nu_factor(P, 1), nu_factor(P, 2), nu_factor(P, 3), nu_factor(P, 4)}, P.Y()};
}

/// S^(j) = int |f_j ... f_4 g|^2, j = 1..4.
inline ProductSpec spec_S(const Parameters& P, int j = 1) {
    if (j < 1 || j > 4) throw std::invalid_argument("spec_S: j must be in 1..4");
    ProductSpec s;
    for (int i = j; i <= 4; ++i) s.factors.push_back(f_factor(P, i, Mode::abs2));
    s.factors.push_back(g_factor(P, Mode::abs2));
    return s;
}

/// T^(j) = int H_j |f_{j+1} ... f_4 g|^2, j = 1..3.
inline ProductSpec spec_T(const Parameters& P, int j = 1) {
    if (j < 1 || j > 3) throw std::invalid_argument("spec_T: j must be in 1..3");
    ProductSpec s;
    s.factors.push_back(h_factor(P, j));
    for (int i = j + 1; i <= 4; ++i) s.factors.push_back(f_factor(P, i, Mode::abs2));
    s.factors.push_back(g_factor(P, Mode::abs2));
    return s;
}

inline ProductSpec spec_V(const Parameters& P) {
    return {{f_factor(P, 1, Mode::abs2), nu_factor(P, 2, Mode::abs2), nu_factor(P, 3, Mode::abs2),
             nu_factor(P, 4, Mode::abs2)},
            P.Y() * P.Y()};
}

inline ProductSpec spec_W(const Parameters& P) {
    return {{h_factor(P, 1), nu_factor(P, 2, Mode::abs2), nu_factor(P, 3, Mode::abs2), nu_factor(P, 4, Mode::abs2)},
            P.Y() * P.Y()};
}

/// Spec by name: R, U, S, T, V, W.
inline ProductSpec spec_by_name(const std::string& which, const Parameters& P) {
    if (which == "R") return spec_R(P);
    if (which == "U") return spec_U(P);
    if (which == "S") return spec_S(P);
    if (which == "T") return spec_T(P);
    if (which == "V") return spec_V(P);
    if (which == "W") return spec_W(P);
    throw std::invalid_argument("unknown integral '" + which + "'");
}

inline bool integral_takes_n(const std::string& which) { return which == "R" || which == "U"; }

/// The n-th Fourier coefficient of the product restricted to B:
/// int_B e(-n alpha) prod(alpha) d alpha.
inline IntegralResult fourier_coefficient(const ProductSpec& spec, std::int64_t n, const ArcSet& B,
                                          const QuadOptions& opts = {}) {
    return integrate_product(spec, n, B, opts);
}

inline IntegralResult integral_R(const Parameters& P, const ArcSet& B, std::int64_t n, const QuadOptions& o = {}) {
    return integrate_product(spec_R(P), n, B, o);
}
inline IntegralResult integral_U(const Parameters& P, const ArcSet& B, std::int64_t n, const QuadOptions& o = {}) {
    return integrate_product(spec_U(P), n, B, o);
}
inline IntegralResult integral_S(const Parameters& P, const ArcSet& B, const QuadOptions& o = {}) {
    return integrate_product(spec_S(P), 0, B, o);
}
inline IntegralResult integral_T(const Parameters& P, const ArcSet& B, const QuadOptions& o = {}) {
    return integrate_product(spec_T(P), 0, B, o);
}
inline IntegralResult integral_V(const Parameters& P, const ArcSet& B, const QuadOptions& o = {}) {
    return integrate_product(spec_V(P), 0, B, o);
}
inline IntegralResult integral_W(const Parameters& P, const ArcSet& B, const QuadOptions& o = {}) {
    return integrate_product(spec_W(P), 0, B, o);
}

}  // namespace waring4
