// Exact constants, the diminishing-range parameter schedule, lattice ranges
// and points of the torus R/Z.
#pragma once

#include "waring4/int128.hpp"
#include "waring4/rational.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace waring4 {

/// A requested computation exceeds a configured size budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Constants

/// Range and radius factors shared by every module. A single edit here
/// retunes the whole library.
struct Constants {
    ExactRational c_half{1, 2};   // lower range factor on x
    ExactRational c_16{1, 16};    // lower range factor on z = x^4
    ExactRational c_8{1, 8};      // mollification radius factor
    ExactRational c_h{32, 1};     // shift bound factor: h <= c_h P1^-3 P2^4
};

inline const Constants& constants() {
    static const Constants c{};
    return c;
}

/// 1 - (1/k) * sum_{i<h} theta_k^i, theta_k = 1 - 1/k + 1/(k 2^(k-2)).
inline ExactRational gamma0_general(long long h, long long k) {
    if (k < 3) throw std::invalid_argument("gamma0_general: k must be >= 3");
    if (h < 1) throw std::invalid_argument("gamma0_general: h must be >= 1");
    const ExactRational inv_k(1, k);
    const ExactRational theta = ExactRational(1) - inv_k + ExactRational(BigInt(1), BigInt(k) << (k - 2));
    ExactRational sum(0), term(1);
    for (long long i = 0; i < h; ++i) {
        sum += term;
        term *= theta;
    }
    return ExactRational(1) - inv_k * sum;
}

inline const ExactRational& gamma0() {
    static const ExactRational g(4059, 16384);
    return g;
}
inline const ExactRational& gamma1() {
    static const ExactRational g(4992, 16384);
    return g;
}
/// Ratio of consecutive range exponents.
inline const ExactRational& theta4() {
    static const ExactRational t(13, 16);
    return t;
}

// ---------------------------------------------------------------------------
// Lattice ranges

/// Integers x with lower < x <= upper.
struct LatticeRange {
    long double lower = 0;
    long double upper = 0;

    std::int64_t first() const { return static_cast<std::int64_t>(std::floor(lower)) + 1; }
    std::int64_t last() const { return static_cast<std::int64_t>(std::floor(upper)); }
    std::int64_t count() const { return std::max<std::int64_t>(0, last() - first() + 1); }
    bool empty() const { return count() == 0; }
};

/// (X/2, X]
inline LatticeRange x_range_of(double X) {
    return {static_cast<long double>(X) / 2, static_cast<long double>(X)};
}
/// (X^4/16, X^4]
inline LatticeRange z_range_of(double X) {
    const long double x4 = std::pow(static_cast<long double>(X), 4.0L);
    return {x4 / 16, x4};
}
/// Number of y with 0 <= y < Y.
inline std::int64_t y_count_of(double Y) {
    return Y <= 0 ? 0 : static_cast<std::int64_t>(std::ceil(Y));
}

// ---------------------------------------------------------------------------
// Parameters

enum class RangeCheck { enforce, skip };

/// The tuple (P1, P2, P3, P4, Y) plus the context value N.
class Parameters {
public:
    static Parameters make(double p1, double p2, double p3, double p4, double y,
                           RangeCheck check = RangeCheck::enforce) {
        Parameters p;
        p.P_ = {p1, p2, p3, p4};
        p.Y_ = y;
        p.N_ = std::floor(std::pow(static_cast<long double>(p1), 4.0L));
        p.validate(check);
        return p;
    }

    double P(int j) const { return P_.at(static_cast<std::size_t>(j - 1)); }
    double Y() const { return Y_; }
    double N() const { return N_; }
    const std::optional<ExactRational>& gamma() const { return gamma_; }
    /// Exponents of P_j relative to P = P1, present when built by
    /// choose_parameters.
    const std::optional<std::array<ExactRational, 4>>& exponents() const { return exponents_; }
    bool gamma_in_window() const { return gamma_in_window_; }

    LatticeRange x_range(int j) const { return x_range_of(P(j)); }
    LatticeRange z_range(int j) const { return z_range_of(P(j)); }
    std::int64_t y_count() const { return y_count_of(Y_); }

    /// Shift bound Z_j = c_h P_j^-3 P_{j+1}^4 of the difference sum H_j.
    double shift_bound(int j) const {
        if (j < 1 || j > 3) throw std::invalid_argument("shift_bound: j must be in 1..3");
        const long double pj = P(j), pn = P(j + 1);
        return static_cast<double>(constants().c_h.to_long_double() * std::pow(pn, 4.0L) / (pj * pj * pj));
    }

    /// P_j^{3/4} <= P_{j+1} <= P_j for j = 1, 2, 3 (relative slack 1e-12).
    bool satisfies_range_condition() const {
        for (int j = 1; j <= 3; ++j) {
            const double lo = std::pow(P(j), 0.75);
            if (P(j + 1) > P(j) * (1 + 1e-12) || P(j + 1) < lo * (1 - 1e-12)) return false;
        }
        return true;
    }

    /// Flat key/value form; reals as decimal strings, rationals as "num/den".
    std::vector<std::pair<std::string, std::string>> record() const;

    friend Parameters choose_parameters(double N, const ExactRational& gamma);

private:
    void validate(RangeCheck check) const {
        for (double p : P_)
            if (!(p > 0) || !std::isfinite(p)) throw std::invalid_argument("parameters: P_j must be positive");
        if (!(Y_ >= 1) || !std::isfinite(Y_)) throw std::invalid_argument("parameters: Y must be >= 1");
        if (check == RangeCheck::enforce && !satisfies_range_condition())
            throw std::invalid_argument("parameters: P_j^{3/4} <= P_{j+1} <= P_j violated");
    }

    std::array<double, 4> P_{};
    double Y_ = 1;
    double N_ = 1;
    std::optional<ExactRational> gamma_;
    std::optional<std::array<ExactRational, 4>> exponents_;
    bool gamma_in_window_ = true;
};

/// Shortest round-trip decimal form of a double.
inline std::string decimal(double v) {
    if (v == 0) return "0";
    char buf[40];
    if (v == std::trunc(v) && std::abs(v) < 0x1p53) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::vector<std::pair<std::string, std::string>> Parameters::record() const {
    std::vector<std::pair<std::string, std::string>> r;
    for (int j = 1; j <= 4; ++j) r.emplace_back("P" + std::to_string(j), decimal(P(j)));
    r.emplace_back("Y", decimal(Y_));
    r.emplace_back("N", decimal(N_));
    if (gamma_) r.emplace_back("gamma", gamma_->str());
    if (exponents_)
        for (int j = 1; j <= 4; ++j)
            r.emplace_back("exponent_P" + std::to_string(j), (*exponents_)[static_cast<std::size_t>(j - 1)].str());
    return r;
}

/// P1 = N^{1/4}, P_{j+1} = P_j^{13/16}, Y = N^gamma. Outside the window
/// gamma0 < gamma <= gamma1 the parameters are still built, and
/// gamma_in_window() reports false.
inline Parameters choose_parameters(double N, const ExactRational& gamma) {
    if (!(N > 0) || !std::isfinite(N)) throw std::invalid_argument("choose_parameters: N must be positive");
    Parameters p;
    p.N_ = N;
    p.gamma_ = gamma;
    p.gamma_in_window_ = gamma0() < gamma && gamma <= gamma1();
    const long double log_p = std::log(static_cast<long double>(N)) / 4;
    std::array<ExactRational, 4> ex{ExactRational(1), theta4(), theta4().pow(2), theta4().pow(3)};
    for (std::size_t j = 0; j < 4; ++j)
        p.P_[j] = static_cast<double>(std::exp(ex[j].to_long_double() * log_p));
    p.exponents_ = ex;
    p.Y_ = static_cast<double>(std::exp(gamma.to_long_double() * 4 * log_p));
    if (!(p.Y_ >= 1)) p.Y_ = 1;  // N < 1 or gamma <= 0: keep the invariant Y >= 1
    return p;
}

// ---------------------------------------------------------------------------
// Torus points

/// A point of R/Z, held either as a reduced fraction a/q (q < 2^63) or as a
/// double. Both forms are exact: a double is its own dyadic rational, so
/// phases alpha*m mod 1 are reduced in integer arithmetic.
class TorusPoint {
public:
    TorusPoint() = default;

    static TorusPoint from_double(double a) {
        if (!std::isfinite(a)) throw std::invalid_argument("torus point must be finite");
        double v = a - std::floor(a);
        if (v >= 1.0) v = 0.0;
        TorusPoint t;
        t.value_ = v;
        t.num_ = 0;
        t.den_ = 0;
        return t;
    }

    static TorusPoint from_fraction(long long a, std::uint64_t q) {
        if (q == 0 || q >= (1ull << 63)) throw std::invalid_argument("torus point: denominator out of range");
        const long long qq = static_cast<long long>(q);
        long long r = a % qq;
        if (r < 0) r += qq;
        const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(r), q);
        TorusPoint t;
        t.num_ = static_cast<std::uint64_t>(r) / g;
        t.den_ = q / g;
        t.value_ = static_cast<double>(static_cast<long double>(t.num_) / t.den_);
        return t;
    }

    /// Fractions with a denominator below 2^63 stay exact; anything else is
    /// rounded to the nearest double and marked inexact.
    static TorusPoint from_rational(const ExactRational& r) {
        const BigInt den = r.denominator();
        BigInt num = r.numerator() % den;
        if (num < 0) num += den;
        if (den < (BigInt(1) << 63)) return from_fraction(num.convert_to<long long>(), den.convert_to<std::uint64_t>());
        TorusPoint t = from_double(ExactRational(num, den).to_double());
        t.inexact_ = true;
        return t;
    }

    /// "a/q" is exact; a decimal is parsed as a double and marked inexact.
    static TorusPoint parse(std::string_view s) {
        auto parsed = parse_rational(s);
        if (!parsed.from_decimal) return from_rational(parsed.value);
        TorusPoint t = from_double(std::stod(std::string(s)));
        t.inexact_ = true;
        return t;
    }

    double value() const { return value_; }
    bool is_fraction() const { return den_ != 0; }
    std::uint64_t numerator() const { return num_; }
    std::uint64_t denominator() const { return den_; }
    bool is_zero() const { return value_ == 0.0 && (den_ == 0 || num_ == 0); }
    bool inexact() const { return inexact_; }

    /// ||alpha||, the distance to the nearest integer.
    double distance() const {
        if (is_fraction()) return static_cast<double>(static_cast<long double>(std::min(num_, den_ - num_)) / den_);
        return std::min(value_, 1.0 - value_);
    }

    ExactRational exact() const {
        if (is_fraction()) return ExactRational(BigInt(num_), BigInt(den_));
        return ExactRational::from_double(value_);
    }

    /// The fractional part of alpha*m, in [0, 1).
    double phase(i128 m) const {
        if (is_fraction()) {
            const i128 q = static_cast<i128>(den_);
            i128 r = m % q;
            if (r < 0) r += q;
            const u128 prod = (static_cast<u128>(r) * num_) % den_;
            return static_cast<double>(static_cast<long double>(prod) / den_);
        }
        if (value_ == 0.0) return 0.0;
        int exp = 0;
        const double mant = std::frexp(value_, &exp);
        const auto M = static_cast<std::uint64_t>(std::ldexp(mant, 53));
        const int E = 53 - exp;  // value = M * 2^-E, E >= 53
        if (E <= 128) {
            u128 prod = static_cast<u128>(M) * static_cast<u128>(m);  // wraps mod 2^128
            if (E < 128) prod &= (static_cast<u128>(1) << E) - 1;
            long double f = std::ldexp(static_cast<long double>(prod), -E);
            if (f >= 1.0L) f = 0.0L;
            return static_cast<double>(f);
        }
        long double t = static_cast<long double>(value_) * static_cast<long double>(m);
        t -= std::floor(t);
        double f = static_cast<double>(t);
        return f >= 1.0 ? 0.0 : f;
    }

    /// The point 1 - alpha (that is, -alpha).
    TorusPoint negated() const {
        if (is_fraction()) return from_fraction(-static_cast<long long>(num_), den_);
        TorusPoint t = from_double(value_ == 0.0 ? 0.0 : 1.0 - value_);
        t.inexact_ = inexact_;
        return t;
    }

    std::string str() const {
        if (is_fraction()) return std::to_string(num_) + "/" + std::to_string(den_);
        return decimal(value_);
    }

private:
    double value_ = 0.0;
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
    bool inexact_ = false;
};

/// min(alpha, 1 - alpha)
inline double torus_distance(const TorusPoint& alpha) { return alpha.distance(); }

}  // namespace waring4
