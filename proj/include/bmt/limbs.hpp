#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace bmt {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Fixed-width little-endian limb vector backing the prime fields.
template <std::size_t N>
using Limbs = std::array<u64, N>;

namespace limb {

constexpr u64 adc(u64 a, u64 b, u64& carry) {
    u128 s = (u128)a + b + carry;
    carry = (u64)(s >> 64);
    return (u64)s;
}

constexpr u64 sbb(u64 a, u64 b, u64& borrow) {
    u128 d = (u128)a - b - borrow;
    borrow = (u64)(d >> 127);
    return (u64)d;
}

// a + b*c + carry, full 128-bit accumulate
constexpr u64 mac(u64 a, u64 b, u64 c, u64& carry) {
    u128 s = (u128)a + (u128)b * c + carry;
    carry = (u64)(s >> 64);
    return (u64)s;
}

template <std::size_t N>
constexpr bool is_zero(const Limbs<N>& a) {
    for (auto x : a)
        if (x) return false;
    return true;
}

template <std::size_t N>
constexpr int cmp(const Limbs<N>& a, const Limbs<N>& b) {
    for (std::size_t i = N; i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

// a += b, returns carry out
template <std::size_t N>
constexpr bool add(Limbs<N>& a, const Limbs<N>& b) {
    u64 c = 0;
    for (std::size_t i = 0; i < N; ++i) a[i] = adc(a[i], b[i], c);
    return c != 0;
}

// a -= b, returns borrow out
template <std::size_t N>
constexpr bool sub(Limbs<N>& a, const Limbs<N>& b) {
    u64 brw = 0;
    for (std::size_t i = 0; i < N; ++i) a[i] = sbb(a[i], b[i], brw);
    return brw != 0;
}

template <std::size_t N>
constexpr bool bit(const Limbs<N>& a, std::size_t i) {
    return (a[i / 64] >> (i % 64)) & 1;
}

template <std::size_t N>
constexpr std::size_t bit_length(const Limbs<N>& a) {
    for (std::size_t i = N; i-- > 0;) {
        if (a[i]) {
            std::size_t b = 64;
            while (b > 0 && !((a[i] >> (b - 1)) & 1)) --b;
            return i * 64 + b;
        }
    }
    return 0;
}

template <std::size_t N, std::size_t M>
constexpr Limbs<N + M> mul_wide(const Limbs<N>& a, const Limbs<M>& b) {
    Limbs<N + M> r{};
    for (std::size_t i = 0; i < N; ++i) {
        u64 carry = 0;
        for (std::size_t j = 0; j < M; ++j) r[i + j] = mac(r[i + j], a[i], b[j], carry);
        r[i + M] = carry;
    }
    return r;
}

// In-place division by a single limb, returns remainder.
template <std::size_t N>
constexpr u64 div_small(Limbs<N>& a, u64 d) {
    u128 rem = 0;
    for (std::size_t i = N; i-- > 0;) {
        u128 cur = (rem << 64) | a[i];
        a[i] = (u64)(cur / d);
        rem = cur % d;
    }
    return (u64)rem;
}

template <std::size_t N>
constexpr Limbs<N> from_hex(std::string_view s) {
    Limbs<N> r{};
    for (char c : s) {
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else continue;
        // r = r*16 + v
        u64 carry = (u64)v;
        for (std::size_t i = 0; i < N; ++i) {
            u128 cur = ((u128)r[i] << 4) | carry;
            r[i] = (u64)cur;
            carry = (u64)(cur >> 64);
        }
    }
    return r;
}

template <std::size_t N, std::size_t M>
constexpr Limbs<N> truncate(const Limbs<M>& a) {
    static_assert(N <= M);
    Limbs<N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i];
    return r;
}

}  // namespace limb
}  // namespace bmt
