// Major/central/minor arc partitions of the torus with exact rational endpoints.
//
// For j = 1, 2, 3 the major arcs are M(q, a) = {||alpha - a/q|| <= q^-1 P_j P_{j+1}^-4}
// for 2 <= q <= P_j, gcd(a, q) = 1. The central arc is M(1, 0) for j = 2, 3;
// for j = 1 it is the annulus P_2^-3/8 < ||alpha|| <= P_1 P_2^-4, the disc
// inside it (A(2,0)) being a separate piece. Minor arcs are the complement.
// Every endpoint is an exact rational: each P_j is a double and therefore an
// exact dyadic number.
#pragma once

#include "waring4/params.hpp"
#include "waring4/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waring4 {

/// Closed interval [lo, hi] inside [0, 1].
struct Interval {
    ExactRational lo, hi;
    ExactRational length() const { return hi - lo; }
};

struct Arc {
    std::uint64_t q = 1;
    std::uint64_t a = 0;
    ExactRational radius;

    ExactRational center() const { return ExactRational(static_cast<long long>(a), static_cast<long long>(q)); }
};

enum class ArcKind { major, central, minor, full_torus, a0, a1 };

inline std::string arc_label(ArcKind kind, int j) {
    const std::string js = std::to_string(j);
    switch (kind) {
        case ArcKind::major: return "major(" + js + ")";
        case ArcKind::central: return "central(" + js + ")";
        case ArcKind::minor: return "minor(" + js + ")";
        case ArcKind::full_torus: return "full-torus";
        case ArcKind::a0: return "A(" + js + ",0)";
        case ArcKind::a1: return "A(" + js + ",1)";
    }
    return "?";
}

namespace detail {

/// Sorts and merges overlapping or touching intervals.
inline std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> out;
    for (Interval& iv : v) {
        if (!out.empty() && iv.lo <= out.back().hi) {
            if (out.back().hi < iv.hi) out.back().hi = iv.hi;
        } else {
            out.push_back(std::move(iv));
        }
    }
    return out;
}

/// [0, 1] minus the union of `covered` (already merged).
inline std::vector<Interval> complement(const std::vector<Interval>& covered) {
    std::vector<Interval> out;
    ExactRational cursor(0);
    for (const Interval& iv : covered) {
        if (cursor < iv.lo) out.push_back({cursor, iv.lo});
        if (cursor < iv.hi) cursor = iv.hi;
    }
    if (cursor < ExactRational(1)) out.push_back({cursor, ExactRational(1)});
    return out;
}

/// The closed arc {||alpha - c|| <= r} on [0, 1], split at 0 when it wraps.
inline std::vector<Interval> arc_intervals(const ExactRational& c, const ExactRational& r) {
    const ExactRational zero(0), one(1);
    if (ExactRational(1, 2) <= r) return {{zero, one}};
    const ExactRational lo = c - r, hi = c + r;
    if (lo < zero) return {{zero, hi}, {lo + one, one}};
    if (one < hi) return {{zero, hi - one}, {lo, one}};
    return {{lo, hi}};
}

inline ExactRational torus_norm(const ExactRational& a) {
    const ExactRational one(1);
    return min(a, one - a);
}

}  // namespace detail

/// A union of closed intervals of [0, 1] carrying a partition label.
struct ArcSet {
    ArcKind kind = ArcKind::full_torus;
    int j = 0;
    std::vector<Interval> intervals;  // sorted, pairwise disjoint
    std::vector<Arc> arcs;            // the arcs, for major sets

    std::string label() const { return arc_label(kind, j); }

    ExactRational measure() const {
        ExactRational m(0);
        for (const Interval& iv : intervals) m += iv.length();
        return m;
    }

    bool contains(const ExactRational& alpha) const {
        for (const Interval& iv : intervals)
            if (iv.lo <= alpha && alpha <= iv.hi) return true;
        return false;
    }
};

inline ArcSet full_torus() {
    ArcSet s;
    s.kind = ArcKind::full_torus;
    s.intervals = {{ExactRational(0), ExactRational(1)}};
    return s;
}

/// P_j as an exact rational.
inline ExactRational exact_P(const Parameters& P, int j) { return ExactRational::from_double(P.P(j)); }

/// q * radius of M^{(j)}(q, a): P_j P_{j+1}^-4.
inline ExactRational major_radius_base(int j, const Parameters& P) {
    if (j < 1 || j > 3) throw std::invalid_argument("arcs: j must be in 1..3");
    return exact_P(P, j) / exact_P(P, j + 1).pow(4);
}

inline ExactRational major_radius(int j, const Parameters& P, std::uint64_t q) {
    return major_radius_base(j, P) / ExactRational(static_cast<long long>(q));
}

/// c_8 P_j^-3, the radius of A(j, 0).
inline ExactRational a0_radius(int j, const Parameters& P) {
    if (j < 1 || j > 4) throw std::invalid_argument("arcs: j must be in 1..4");
    return constants().c_8 / exact_P(P, j).pow(3);
}

inline std::uint64_t major_q_max(int j, const Parameters& P) {
    return static_cast<std::uint64_t>(std::floor(P.P(j)));
}

/// Calls fn(arc) for every major arc M(q, a), 2 <= q <= P_j, gcd(a, q) = 1,
/// in increasing q then a, without materializing the family.
template <class Fn>
void for_each_major_arc(int j, const Parameters& P, Fn&& fn) {
    const ExactRational base = major_radius_base(j, P);
    const std::uint64_t q_max = major_q_max(j, P);
    for (std::uint64_t q = 2; q <= q_max; ++q) {
        const ExactRational r = base / ExactRational(static_cast<long long>(q));
        for (std::uint64_t a = 1; a < q; ++a)
            if (std::gcd(a, q) == 1) fn(Arc{q, a, r});
    }
}

inline std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t result = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

/// sum_{q=2}^{P_j} phi(q) * 2 * radius(q), computed without the arcs.
inline ExactRational major_measure_phi(int j, const Parameters& P) {
    const ExactRational base = major_radius_base(j, P);
    ExactRational m(0);
    for (std::uint64_t q = 2; q <= major_q_max(j, P); ++q)
        m += ExactRational(static_cast<long long>(2 * euler_phi(q)), static_cast<long long>(q)) * base;
    return m;
}

inline ArcSet a_set(int j, const Parameters& P, int which) {
    ArcSet s;
    s.j = j;
    const auto disc = detail::arc_intervals(ExactRational(0), a0_radius(j, P));
    if (which == 0) {
        s.kind = ArcKind::a0;
        s.intervals = detail::merge_intervals(disc);
    } else {
        s.kind = ArcKind::a1;
        s.intervals = detail::complement(detail::merge_intervals(disc));
    }
    return s;
}

struct ArcPartition {
    int j = 0;
    ArcSet central, major, minor;
    std::optional<ArcSet> excluded;  // A(2,0) when j = 1
    bool disjoint = false;
    ExactRational total_measure;     // sum of the pieces' measures
    ExactRational major_measure_phi; // phi-weighted closed form
    std::size_t major_arc_count = 0;

    std::vector<const ArcSet*> pieces() const {
        std::vector<const ArcSet*> v;
        if (excluded) v.push_back(&*excluded);
        v.push_back(&central);
        v.push_back(&major);
        v.push_back(&minor);
        return v;
    }
};

/// Builds the j-th partition and checks, in exact arithmetic, that the central
/// and major pieces are pairwise disjoint (closed pieces may share endpoints).
inline ArcPartition build_arcs(int j, const Parameters& P) {
    if (j < 1 || j > 3) throw std::invalid_argument("build_arcs: j must be in 1..3");
    if (!(P.P(j) >= 2)) throw std::invalid_argument("build_arcs: P_j must be >= 2");
    ArcPartition part;
    part.j = j;
    const ExactRational zero(0);

    // Pieces before merging, tagged for the disjointness check.
    std::vector<Interval> all_pieces;

    part.central.kind = ArcKind::central;
    part.central.j = j;
    const ExactRational r_central = major_radius_base(j, P);
    std::vector<Interval> central_iv = detail::arc_intervals(zero, r_central);
    if (j == 1) {
        ArcSet ex = a_set(2, P, 0);
        const std::vector<Interval> disc = ex.intervals;
        // annulus = central disc minus the A(2,0) disc
        std::vector<Interval> annulus;
        for (const Interval& c : detail::merge_intervals(central_iv)) {
            ExactRational lo = c.lo, hi = c.hi;
            for (const Interval& d : disc) {
                if (d.lo <= lo && lo < d.hi) lo = d.hi;
                if (d.lo < hi && hi <= d.hi) hi = d.lo;
            }
            if (lo < hi) annulus.push_back({lo, hi});
        }
        central_iv = annulus;
        for (const Interval& d : disc) all_pieces.push_back(d);
        part.excluded = std::move(ex);
    }
    part.central.intervals = detail::merge_intervals(central_iv);
    for (const Interval& iv : central_iv) all_pieces.push_back(iv);

    part.major.kind = ArcKind::major;
    part.major.j = j;
    std::vector<Interval> major_iv;
    for_each_major_arc(j, P, [&](const Arc& arc) {
        for (Interval& iv : detail::arc_intervals(arc.center(), arc.radius)) {
            all_pieces.push_back(iv);
            major_iv.push_back(std::move(iv));
        }
        part.major.arcs.push_back(arc);
    });
    part.major_arc_count = part.major.arcs.size();
    part.major.intervals = detail::merge_intervals(major_iv);

    std::sort(all_pieces.begin(), all_pieces.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    part.disjoint = true;
    for (std::size_t i = 1; i < all_pieces.size(); ++i) {
        if (all_pieces[i].lo < all_pieces[i - 1].hi) {
            part.disjoint = false;
            break;
        }
    }

    part.minor.kind = ArcKind::minor;
    part.minor.j = j;
    part.minor.intervals = detail::complement(detail::merge_intervals(all_pieces));

    part.total_measure = ExactRational(0);
    for (const ArcSet* s : part.pieces()) part.total_measure += s->measure();
    part.major_measure_phi = waring4::major_measure_phi(j, P);
    return part;
}

/// The arc set named by `which` (full, major, central, minor, A0, A1) for the
/// j-th partition.
inline ArcSet arc_set(const std::string& which, int j, const Parameters& P) {
    if (which == "full") return full_torus();
    if (which == "A0") return a_set(j, P, 0);
    if (which == "A1") return a_set(j, P, 1);
    if (which == "major" || which == "central" || which == "minor") {
        ArcPartition part = build_arcs(j, P);
        if (which == "major") return part.major;
        if (which == "central") return part.central;
        return part.minor;
    }
    throw std::invalid_argument("unknown arc set '" + which + "'");
}

struct Classification {
    ArcKind kind = ArcKind::minor;
    std::uint64_t q = 0, a = 0;  // set for major arcs (and q = 1, a = 0 for central)
    bool excluded = false;       // alpha in A(2,0) when j = 1

    std::string label(int j) const {
        if (excluded) return arc_label(ArcKind::a0, 2);
        if (kind == ArcKind::major) return "major(" + std::to_string(j) + ",q=" + std::to_string(q) + ",a=" + std::to_string(a) + ")";
        return arc_label(kind, j);
    }
};

/// Which piece of the j-th partition contains alpha. Arcs take precedence
/// over the (closed) minor intervals at shared endpoints.
inline Classification classify_alpha(const TorusPoint& alpha, int j, const Parameters& P) {
    if (j < 1 || j > 3) throw std::invalid_argument("classify_alpha: j must be in 1..3");
    const ExactRational x = alpha.exact();
    const ExactRational d0 = detail::torus_norm(x);
    Classification c;
    if (j == 1 && d0 <= a0_radius(2, P)) {
        c.excluded = true;
        c.kind = ArcKind::a0;
        return c;
    }
    if (d0 <= major_radius_base(j, P)) {
        c.kind = ArcKind::central;
        c.q = 1;
        return c;
    }
    const ExactRational base = major_radius_base(j, P);
    for (std::uint64_t q = 2; q <= major_q_max(j, P); ++q) {
        const ExactRational xq = x * ExactRational(static_cast<long long>(q));
        // nearest integer to alpha q
        const ExactRational shifted = xq + ExactRational(1, 2);
        BigInt a = shifted.numerator() / shifted.denominator();  // floor, shifted >= 0
        const ExactRational dist = abs(xq - ExactRational(a, BigInt(1))) / ExactRational(static_cast<long long>(q));
        const std::uint64_t ar = static_cast<std::uint64_t>(BigInt(a % q).convert_to<unsigned long long>());
        if (std::gcd(ar, q) != 1) continue;
        if (dist <= base / ExactRational(static_cast<long long>(q))) {
            c.kind = ArcKind::major;
            c.q = q;
            c.a = ar;
            return c;
        }
    }
    c.kind = ArcKind::minor;
    return c;
}

}  // namespace waring4
