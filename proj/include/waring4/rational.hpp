// Exact rational numbers backed by Boost.Multiprecision.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace waring4 {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
class ExactRational {
public:
    using value_type = boost::multiprecision::cpp_rational;

    ExactRational() = default;
    ExactRational(long long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
    ExactRational(long long num, long long den) {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        v_ = value_type(num, den);
    }
    ExactRational(const BigInt& num, const BigInt& den) {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        v_ = value_type(num, den);
    }
    explicit ExactRational(value_type v) : v_(std::move(v)) {}

    /// The exact binary value of a finite double.
    static ExactRational from_double(double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
        int exp = 0;
        const double mant = std::frexp(x, &exp);
        // mant * 2^53 is an integer for every finite double.
        BigInt m(static_cast<long long>(std::ldexp(mant, 53)));
        exp -= 53;
        if (exp >= 0) return ExactRational(value_type(m << exp));
        return ExactRational(m, BigInt(1) << -exp);
    }

    BigInt numerator() const { return boost::multiprecision::numerator(v_); }
    BigInt denominator() const { return boost::multiprecision::denominator(v_); }
    const value_type& value() const { return v_; }

    double to_double() const { return v_.convert_to<double>(); }
    long double to_long_double() const { return v_.convert_to<long double>(); }

    bool is_integer() const { return denominator() == 1; }
    int sign() const { return v_.sign(); }

    /// "num/den", denominator always printed.
    std::string str() const { return numerator().str() + "/" + denominator().str(); }

    ExactRational pow(unsigned e) const {
        value_type r = 1;
        for (unsigned i = 0; i < e; ++i) r *= v_;
        return ExactRational(r);
    }

    friend ExactRational operator+(const ExactRational& a, const ExactRational& b) { return ExactRational(value_type(a.v_ + b.v_)); }
    friend ExactRational operator-(const ExactRational& a, const ExactRational& b) { return ExactRational(value_type(a.v_ - b.v_)); }
    friend ExactRational operator*(const ExactRational& a, const ExactRational& b) { return ExactRational(value_type(a.v_ * b.v_)); }
    friend ExactRational operator/(const ExactRational& a, const ExactRational& b) {
        if (b.v_ == 0) throw std::domain_error("division by zero rational");
        return ExactRational(value_type(a.v_ / b.v_));
    }
    ExactRational operator-() const { return ExactRational(value_type(-v_)); }
    ExactRational& operator+=(const ExactRational& o) { v_ += o.v_; return *this; }
    ExactRational& operator-=(const ExactRational& o) { v_ -= o.v_; return *this; }
    ExactRational& operator*=(const ExactRational& o) { v_ *= o.v_; return *this; }

    friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
        if (a.v_ < b.v_) return std::strong_ordering::less;
        if (a.v_ > b.v_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    value_type v_{0};
};

inline ExactRational abs(const ExactRational& r) { return r.sign() < 0 ? -r : r; }
inline ExactRational min(const ExactRational& a, const ExactRational& b) { return b < a ? b : a; }
inline ExactRational max(const ExactRational& a, const ExactRational& b) { return a < b ? b : a; }

struct ParsedRational {
    ExactRational value;
    bool from_decimal = false;  // given as a decimal literal, not "a/b"
};

namespace detail {
inline BigInt parse_bigint(std::string_view s, std::string_view whole) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    if (i == s.size()) throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    BigInt v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? BigInt(-v) : v;
}
}  // namespace detail

/// Accepts "a/b", "a", or a decimal such as "0.26" or "1e-8" (converted
/// exactly, base ten, and flagged as decimal input).
inline ParsedRational parse_rational(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("malformed rational: empty string");
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos && s.find('/') == std::string_view::npos) {
        const ParsedRational mant = parse_rational(s.substr(0, e));
        const std::string_view exp_s = s.substr(e + 1);
        if (exp_s.empty() || exp_s.size() > 5) throw std::invalid_argument("malformed rational: '" + std::string(s) + "'");
        const int k = detail::parse_bigint(exp_s, s).convert_to<int>();
        if (k > 400 || k < -400) throw std::invalid_argument("exponent out of range in '" + std::string(s) + "'");
        BigInt scale = 1;
        for (int i = 0; i < (k < 0 ? -k : k); ++i) scale *= 10;
        const ExactRational f = k < 0 ? ExactRational(BigInt(1), scale) : ExactRational(scale, BigInt(1));
        return {mant.value * f, true};
    }
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        BigInt num = detail::parse_bigint(s.substr(0, slash), s);
        std::string_view den_s = s.substr(slash + 1);
        if (!den_s.empty() && (den_s[0] == '-' || den_s[0] == '+'))
            throw std::invalid_argument("malformed rational: '" + std::string(s) + "'");
        BigInt den = detail::parse_bigint(den_s, s);
        if (den == 0) throw std::invalid_argument("malformed rational: zero denominator in '" + std::string(s) + "'");
        return {ExactRational(num, den), false};
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string digits(s.substr(0, dot));
        std::string frac(s.substr(dot + 1));
        if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("malformed rational: '" + std::string(s) + "'");
        bool neg = !digits.empty() && digits[0] == '-';
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        BigInt whole = detail::parse_bigint(digits, s);
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt f = detail::parse_bigint(frac, s);
        BigInt num = (whole < 0 ? BigInt(-whole) : whole) * scale + f;
        if (neg) num = -num;
        return {ExactRational(num, scale), true};
    }
    return {ExactRational(detail::parse_bigint(s, s), BigInt(1)), false};
}

}  // namespace waring4
