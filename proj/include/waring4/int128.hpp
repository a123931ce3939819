// 128-bit integer helpers: decimal I/O and exact integer fourth roots.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace waring4 {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 kU128Max = ~static_cast<u128>(0);

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return {s.rbegin(), s.rend()};
}

inline std::string to_string(i128 v) {
    if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
    return to_string(static_cast<u128>(v));
}

inline u128 parse_u128(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("malformed integer: '" + std::string(s) + "'");
        const unsigned d = static_cast<unsigned>(c - '0');
        if (v > (kU128Max - d) / 10) throw std::out_of_range("integer exceeds 128 bits: '" + std::string(s) + "'");
        v = v * 10 + d;
    }
    return v;
}

constexpr u128 pow4(std::uint64_t x) {
    const u128 sq = static_cast<u128>(x) * x;
    return sq * sq;
}

/// Largest x with x^4 <= n. Floating seed, then integer correction; the
/// result always satisfies x^4 <= n < (x+1)^4.
inline std::uint64_t iroot4(u128 n) {
    // floor(n^(1/4)) <= 2^32 - 1 for every 128-bit n.
    constexpr std::uint64_t kMaxRoot = 0xFFFFFFFFull;
    long double seed = std::sqrt(std::sqrt(static_cast<long double>(n)));
    std::uint64_t x = seed >= static_cast<long double>(kMaxRoot) ? kMaxRoot
                                                                 : static_cast<std::uint64_t>(seed);
    while (x > 0 && pow4(x) > n) --x;
    while (x < kMaxRoot && pow4(x + 1) <= n) ++x;
    return x;
}

/// Smallest x >= 0 with x^4 >= n.
inline std::uint64_t ceil_root4(u128 n) {
    const std::uint64_t r = iroot4(n);
    return pow4(r) == n ? r : r + 1;
}

}  // namespace waring4
