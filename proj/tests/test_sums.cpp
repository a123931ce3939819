// Exponential sums and counting functions against brute-force oracles.
#include "oracles.hpp"
#include "waring4/counting.hpp"
#include "waring4/weyl.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace waring4;

namespace {

std::complex<double> to_c(oracle::lcplx z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

void expect_close(std::complex<double> got, std::complex<double> want, double tol, const std::string& what) {
    EXPECT_LE(std::abs(got - want), tol) << what << ": got " << got << " want " << want;
}

struct Fraction {
    long long a;
    long long q;
};

std::vector<Fraction> sample_fractions() {
    std::vector<Fraction> v{{0, 1}, {1, 2}, {1, 3}, {2, 5}, {7, 16}, {1, 1000}, {999, 1000}, {12345, 65536}, {3, 1000003}};
    std::mt19937_64 rng(23);
    for (int i = 0; i < 12; ++i) {
        const long long q = 2 + static_cast<long long>(rng() % 1000000000ull);
        v.push_back({static_cast<long long>(rng() % static_cast<std::uint64_t>(q)), q});
    }
    return v;
}

Parameters tiny(double p1, double p2, double p3, double p4, double y) {
    return Parameters::make(p1, p2, p3, p4, y, RangeCheck::skip);
}

std::vector<long double> Pvec(const Parameters& P) {
    return {P.P(1), P.P(2), P.P(3), P.P(4)};
}

}  // namespace

// ---------------------------------------------------------------------------
// f, g, nu, H

TEST(WeylF, MatchesOracleAtFractions) {
    for (double X : {2.0, 3.0, 5.5, 8.0, 17.0, 40.0, 101.0})
        for (const auto& [a, q] : sample_fractions())
            expect_close(weyl_f(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), X),
                         to_c(oracle::f(a, q, X)), 1e-11 * X, "f(" + std::to_string(a) + "/" + std::to_string(q) + ")");
}

TEST(WeylF, MatchesOracleAtDoubles) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 20; ++i) {
        const long long k = static_cast<long long>(rng() >> 24);  // alpha = k / 2^40
        const double alpha = std::ldexp(static_cast<double>(k), -40);
        expect_close(weyl_f(TorusPoint::from_double(alpha), 60), to_c(oracle::f(k, 1LL << 40, 60)), 1e-10, "f dyadic");
    }
}

TEST(WeylF, ZeroAndSymmetry) {
    for (double X : {2.0, 2.5, 9.5, 64.0}) {
        EXPECT_EQ(weyl_f(TorusPoint::from_double(0), X), std::complex<double>(static_cast<double>(x_range_of(X).count()), 0));
        const auto a = weyl_f(TorusPoint::from_fraction(3, 7), X);
        const auto b = weyl_f(TorusPoint::from_fraction(4, 7), X);
        expect_close(a, std::conj(b), 1e-12 * X, "conjugate symmetry");
    }
}

TEST(WeylF, DerivativeMatchesDefinition) {
    for (double X : {4.0, 9.0, 30.0})
        for (const auto& [a, q] : sample_fractions()) {
            const auto vd = weyl_f_with_derivative(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), X);
            oracle::lcplx d{};
            for (long long x : oracle::xs(X))
                d += oracle::lcplx(0, 2 * std::numbers::pi_v<long double> * static_cast<long double>(oracle::p4(x))) *
                     oracle::e_frac(a, q, oracle::BigInt(oracle::p4(x)));
            expect_close(vd.derivative, to_c(d), 1e-10 * std::pow(X, 5), "f'");
            expect_close(vd.value, weyl_f(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), X), 0, "f value");
        }
}

TEST(WeylF, ThreadCountDoesNotChangeBits) {
    for (const auto& [a, q] : sample_fractions()) {
        const TorusPoint p = TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q));
        const auto one = weyl_f(p, 20000, Exec{1});
        EXPECT_EQ(one, weyl_f(p, 20000, Exec{4}));
        EXPECT_EQ(one, weyl_f(p, 20000, Exec{8}));
    }
}

TEST(WeylF, RejectsOutOfRange) {
    EXPECT_THROW(weyl_f(TorusPoint::from_double(0.1), 1.5), std::invalid_argument);
    EXPECT_THROW(weyl_f(TorusPoint::from_double(0.1), 1e6), BudgetExceeded);
}

TEST(WeylG, MatchesOracle) {
    for (double Y : {1.0, 2.0, 2.5, 7.0, 64.0, 1000.0})
        for (const auto& [a, q] : sample_fractions())
            expect_close(weyl_g(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), Y), to_c(oracle::g(a, q, Y)),
                         1e-9 * Y, "g");
}

TEST(WeylG, ExamplesAndBound) {
    expect_close(weyl_g(TorusPoint::parse("1/2"), 4), 0, 1e-15, "g(1/2, 4)");
    EXPECT_EQ(weyl_g(TorusPoint::from_double(0), 7.5), std::complex<double>(8, 0));
    std::mt19937_64 rng(31);
    for (int i = 0; i < 2000; ++i) {
        const double alpha = std::ldexp(static_cast<double>(rng() >> 11), -53);
        const double Y = 1 + static_cast<double>(rng() % 100000) / 7;
        const TorusPoint p = TorusPoint::from_double(alpha);
        const double bound = std::min(std::ceil(Y), 1 / (2 * p.distance()));
        EXPECT_LE(std::abs(weyl_g(p, Y)), bound * (1 + 1e-9)) << alpha << " " << Y;
    }
    EXPECT_THROW(weyl_g(TorusPoint::from_double(0.1), 0.5), std::invalid_argument);
}

TEST(MollifiedNu, MatchesOracle) {
    for (double X : {2.0, 2.5, 3.0, 4.5, 6.0})
        for (const auto& [a, q] : sample_fractions())
            expect_close(mollified_nu(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), X), to_c(oracle::nu(a, q, X)),
                         1e-12 * X, "nu");
}

TEST(MollifiedNu, ValueAtZero) {
    long double s = 0;
    for (int z = 2; z <= 16; ++z) s += 0.25L * std::pow(static_cast<long double>(z), -0.75L);
    EXPECT_NEAR(mollified_nu(TorusPoint::from_double(0), 2).real(), static_cast<double>(s), 1e-14);
    EXPECT_NEAR(static_cast<double>(s), 0.905181621, 1e-9);
}

TEST(MollifiedNu, ManyEqualsSingleAndDerivative) {
    const auto fr = sample_fractions();
    std::vector<TorusPoint> pts;
    for (const auto& [a, q] : fr) pts.push_back(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)));
    const auto many = mollified_nu_many(pts, 7, Exec{3}, true);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(many[i].value, mollified_nu(pts[i], 7));
        oracle::lcplx d{};
        const auto& [a, q] = fr[i];
        for (long long z : oracle::zs(7))
            d += oracle::lcplx(0, 2 * std::numbers::pi_v<long double> * static_cast<long double>(z) * 0.25L *
                                      std::pow(static_cast<long double>(z), -0.75L)) *
                 oracle::e_frac(a, q, oracle::BigInt(z));
        expect_close(many[i].derivative, to_c(d), 1e-9 * 2401, "nu'");
    }
    EXPECT_THROW(mollified_nu_many(pts, 64, Exec{}, false, 1000), BudgetExceeded);
}

TEST(DiffSumH, MatchesOracle) {
    for (double X : {4.0, 8.0, 13.5, 30.0})
        for (double Z : {0.0, 1.0, 2.0, 3.7, 100.0})
            for (const auto& [a, q] : sample_fractions())
                expect_close(diff_sum_H(TorusPoint::from_fraction(a, static_cast<std::uint64_t>(q)), X, Z),
                             to_c(oracle::H(a, q, X, Z)), 1e-11 * X * X, "H");
}

TEST(DiffSumH, ExampleAndLattice) {
    EXPECT_EQ(diff_sum_H(TorusPoint::from_double(0), 8, 2), std::complex<double>(5, 0));
    const ShiftLattice lat(8, 2);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> seen;
    lat.visit(0, lat.size(), [&](std::uint64_t x, std::uint64_t h) { seen.emplace_back(x, h); });
    EXPECT_EQ(seen, (std::vector<std::pair<std::uint64_t, std::uint64_t>>{{5, 1}, {6, 1}, {7, 1}, {5, 2}, {6, 2}}));
    // split visits concatenate to the full visit
    std::vector<std::pair<std::uint64_t, std::uint64_t>> parts;
    for (std::size_t b = 0; b < lat.size(); b += 2)
        lat.visit(b, std::min(lat.size(), b + 2), [&](std::uint64_t x, std::uint64_t h) { parts.emplace_back(x, h); });
    EXPECT_EQ(parts, seen);
}

// ---------------------------------------------------------------------------
// r, r', rho

TEST(CountR, MatchesOracle) {
    for (double X : {2.0, 8.0, 15.5, 24.0})
        for (long long n = -40000; n <= 40000; n += 37) EXPECT_EQ(count_r(n, X), static_cast<std::uint64_t>(oracle::r(n, X))) << n;
    EXPECT_EQ(count_r(671, 8), 1u);  // 6^4 - 5^4
    EXPECT_EQ(count_r(0, 8), 4u);
    for (long long x = 5; x <= 8; ++x)
        for (long long xp = 5; xp <= 8; ++xp)
            if (x != xp) {
                EXPECT_EQ(count_r(oracle::p4(xp) - oracle::p4(x), 8), 1u);
            }
}

TEST(CountR, EvenInN) {
    for (long long n = 1; n < 5000; ++n) EXPECT_EQ(count_r(n, 9), count_r(-n, 9));
}

TEST(CountRPrime, MatchesOracle) {
    for (const Parameters& P : {tiny(8, 6, 5, 4, 2), tiny(16, 8, 5, 4, 2), tiny(12, 11, 9, 7, 3)}) {
        const long long hmax = r_prime_h_max(P);
        for (long long n = 1; n <= 70000; n += 13)
            EXPECT_EQ(count_r_prime(n, P), static_cast<std::uint64_t>(oracle::r_prime(n, P.P(1), hmax))) << n;
    }
    EXPECT_THROW(count_r_prime(0, tiny(8, 6, 5, 4, 2)), std::invalid_argument);
}

TEST(CountRPrime, EqualsRForPositiveN) {
    // (x, x') -> (x, h = x' - x) is a bijection for n > 0 once h_max covers every shift
    const Parameters P = tiny(16, 8, 5, 4, 2);
    ASSERT_GE(r_prime_h_max(P), 8);
    for (long long n = 1; n <= 4 * 4096; ++n) EXPECT_EQ(count_r(n, P.P(1)), count_r_prime(n, P)) << n;
}

TEST(Rho, MatchesOracle) {
    for (const Parameters& P : {tiny(1, 3, 2.5, 2, 1), tiny(1, 2.5, 2.2, 1.5, 1), tiny(1, 3.5, 2, 2, 1)}) {
        const RhoTable rho(P);
        for (long long n = -rho.span() - 3; n <= rho.span() + 3; ++n) {
            const double want = static_cast<double>(oracle::rho(n, P.P(2), P.P(3), P.P(4)));
            EXPECT_NEAR(rho(n), want, 1e-13 * std::max(1.0, want)) << n;
        }
    }
}

TEST(Rho, EvenPositiveMaximalAtZero) {
    const RhoTable rho(tiny(1, 5, 4, 3, 1), Exec{2});
    for (long long n = 1; n <= rho.span() + 2; n += 7) {
        EXPECT_EQ(rho(n), rho(-n));
        EXPECT_GE(rho(n), 0.0);
        EXPECT_LE(rho(n), rho(0) * (1 + 1e-12));
    }
    EXPECT_EQ(rho(rho.span() + 1), 0.0);
    EXPECT_THROW(RhoTable(tiny(1, 40, 40, 40, 1), Exec{}, 1000), BudgetExceeded);
}

// ---------------------------------------------------------------------------
// R(n), S, T

TEST(DirectR, MatchesOracle) {
    for (const Parameters& P : {tiny(6, 5, 4, 3.5, 3), tiny(4, 4, 3, 3, 1), tiny(5, 3, 3, 2, 6.5)}) {
        const auto [lo, hi] = R_support(P);
        for (long long n = lo - 10; n <= hi + 10; ++n)
            EXPECT_EQ(direct_R(n, P), static_cast<std::uint64_t>(oracle::R(n, Pvec(P), P.Y()))) << n;
    }
}

TEST(ForEachR, WindowsAndThreadsAgree) {
    const Parameters P = tiny(9, 7, 6, 5, 4);
    const auto [lo, hi] = R_support(P);
    std::vector<std::uint64_t> ref;
    for (long long n = lo - 5; n <= hi + 5; ++n) ref.push_back(direct_R(n, P));
    for (std::int64_t window : {1LL, 7LL, 1000LL, 1LL << 22})
        for (unsigned threads : {1u, 4u}) {
            std::vector<std::uint64_t> got;
            std::int64_t expect_n = lo - 5;
            for_each_R(P, lo - 5, hi + 5, Exec{threads}, [&](std::int64_t n, std::uint64_t v) {
                EXPECT_EQ(n, expect_n++);
                got.push_back(v);
            }, window);
            EXPECT_EQ(got, ref) << window << " " << threads;
        }
}

TEST(ForEachR, MomentIdentities) {
    const Parameters P = tiny(12, 10, 8, 6, 5);
    const auto [lo, hi] = R_support(P);
    u128 s1 = 0, s2 = 0;
    for_each_R(P, lo, hi, Exec{2}, [&](std::int64_t, std::uint64_t v) {
        s1 += v;
        s2 += static_cast<u128>(v) * v;
    });
    EXPECT_EQ(s1, diagonal_count(P, 1));
    EXPECT_EQ(s2, S_count(P, 1));
}

TEST(SCount, MatchesOracle) {
    for (const Parameters& P : {tiny(6, 5, 4, 3.5, 3), tiny(8, 6, 5, 4, 2), tiny(5, 5, 5, 5, 1)})
        for (int j = 1; j <= 4; ++j) {
            EXPECT_EQ(S_count(P, j), static_cast<u128>(oracle::S(Pvec(P), P.Y(), j))) << j;
            EXPECT_GE(S_count(P, j), diagonal_count(P, j));
        }
}

TEST(TCount, MatchesOracle) {
    for (const Parameters& P : {tiny(6, 5, 4, 3.5, 3), tiny(8, 6, 5, 4, 2), tiny(10, 8, 7, 6, 4)})
        for (int j = 1; j <= 3; ++j)
            EXPECT_EQ(T_count(P, j), static_cast<u128>(oracle::T(Pvec(P), P.Y(), j, P.shift_bound(j)))) << j;
    EXPECT_THROW(T_count(tiny(6, 5, 4, 3.5, 3), 4), std::invalid_argument);
}

TEST(SumDistribution, TotalsAndBudget) {
    const Parameters P = tiny(8, 6, 5, 4, 2);
    for (int j = 1; j <= 5; ++j) {
        const SumDistribution d = sum_distribution(P, j);
        u128 total = 0;
        for (auto c : d.counts) total += c;
        EXPECT_EQ(total, diagonal_count(P, j));
    }
    EXPECT_THROW(sum_distribution(tiny(200, 200, 200, 200, 1), 1), BudgetExceeded);
}
