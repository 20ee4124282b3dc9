#pragma once

#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "bmt/limbs.hpp"

namespace bmt {

// Prime field with Montgomery representation. Cfg supplies the limb count
// and the modulus as a hex string; every derived constant is computed at
// compile time so there are no transcribed magic values to get wrong.
template <class Cfg>
class Fq {
public:
    static constexpr std::size_t N = Cfg::limbs;
    static constexpr std::size_t BYTES = N * 8;

    static constexpr Limbs<N> MOD = limb::from_hex<N>(Cfg::modulus_hex);

private:
    static constexpr u64 compute_inv() {
        // Newton iteration for MOD[0]^-1 mod 2^64, then negate.
        u64 inv = 1;
        for (int i = 0; i < 63; ++i) {
            inv *= inv;
            inv *= MOD[0];
        }
        return ~inv + 1;
    }

    static constexpr Limbs<N> double_mod(Limbs<N> a) {
        u64 top = a[N - 1] >> 63;
        for (std::size_t i = N; i-- > 1;) a[i] = (a[i] << 1) | (a[i - 1] >> 63);
        a[0] <<= 1;
        if (top || limb::cmp(a, MOD) >= 0) limb::sub(a, MOD);
        return a;
    }

    static constexpr Limbs<N> compute_pow2(std::size_t bits) {
        Limbs<N> a{};
        a[0] = 1;
        if (limb::cmp(a, MOD) >= 0) limb::sub(a, MOD);
        for (std::size_t i = 0; i < bits; ++i) a = double_mod(a);
        return a;
    }

public:
    static constexpr u64 INV = compute_inv();
    static constexpr Limbs<N> R = compute_pow2(64 * N);
    static constexpr Limbs<N> R2 = compute_pow2(128 * N);

    constexpr Fq() = default;

    static constexpr Fq zero() { return Fq(); }
    static constexpr Fq one() { Fq r; r.m_ = R; return r; }

    static constexpr Fq from_u64(u64 v) {
        Limbs<N> a{};
        a[0] = v;
        return from_canonical(a);
    }

    // Canonical integer (< MOD assumed reduced by caller) -> Montgomery form.
    static constexpr Fq from_canonical(const Limbs<N>& a) {
        Fq r;
        r.m_ = mont_mul(a, R2);
        return r;
    }

    constexpr Limbs<N> to_canonical() const {
        Limbs<2 * N + 2> t{};
        for (std::size_t i = 0; i < N; ++i) t[i] = m_[i];
        return mont_reduce(t);
    }

    constexpr bool is_zero() const { return limb::is_zero(m_); }
    constexpr bool operator==(const Fq& o) const { return m_ == o.m_; }
    constexpr bool operator!=(const Fq& o) const { return m_ != o.m_; }

    constexpr Fq operator+(const Fq& o) const {
        Fq r = *this;
        bool carry = limb::add(r.m_, o.m_);
        if (carry || limb::cmp(r.m_, MOD) >= 0) limb::sub(r.m_, MOD);
        return r;
    }

    constexpr Fq operator-(const Fq& o) const {
        Fq r = *this;
        if (limb::sub(r.m_, o.m_)) limb::add(r.m_, MOD);
        return r;
    }

    constexpr Fq operator-() const {
        if (is_zero()) return *this;
        Fq r;
        r.m_ = MOD;
        limb::sub(r.m_, m_);
        return r;
    }

    constexpr Fq operator*(const Fq& o) const {
        Fq r;
        r.m_ = mont_mul(m_, o.m_);
        return r;
    }

    constexpr Fq& operator+=(const Fq& o) { return *this = *this + o; }
    constexpr Fq& operator-=(const Fq& o) { return *this = *this - o; }
    constexpr Fq& operator*=(const Fq& o) { return *this = *this * o; }

    constexpr Fq square() const { return *this * *this; }

    constexpr Fq dbl() const { return *this + *this; }

    template <std::size_t M>
    constexpr Fq pow(const Limbs<M>& e) const {
        Fq acc = one();
        std::size_t nbits = limb::bit_length(e);
        for (std::size_t i = nbits; i-- > 0;) {
            acc = acc.square();
            if (limb::bit(e, i)) acc = acc * *this;
        }
        return acc;
    }

    // Fermat inversion; zero maps to zero.
    constexpr Fq inverse() const {
        Limbs<N> e = MOD;
        Limbs<N> two{};
        two[0] = 2;
        limb::sub(e, two);
        return pow(e);
    }

    // Legendre symbol: 1, 0, or -1 encoded as {1, 0, MOD-1} via square test.
    constexpr bool is_square() const {
        if (is_zero()) return true;
        Limbs<N> e = MOD;
        Limbs<N> one_l{};
        one_l[0] = 1;
        limb::sub(e, one_l);
        limb::div_small(e, 2);
        return pow(e) == one();
    }

    // Valid when MOD == 3 (mod 4): candidate root a^((p+1)/4); caller must
    // check square() == a if the input may be a non-residue.
    constexpr Fq sqrt_3mod4() const {
        Limbs<N> e = MOD;
        Limbs<N> one_l{};
        one_l[0] = 1;
        limb::add(e, one_l);
        limb::div_small(e, 4);
        return pow(e);
    }

    void to_bytes_be(std::span<std::uint8_t> out) const {
        Limbs<N> a = to_canonical();
        for (std::size_t i = 0; i < BYTES; ++i)
            out[i] = (std::uint8_t)(a[N - 1 - i / 8] >> (56 - 8 * (i % 8)));
    }

    std::array<std::uint8_t, BYTES> to_bytes_be() const {
        std::array<std::uint8_t, BYTES> out{};
        to_bytes_be(std::span<std::uint8_t>(out));
        return out;
    }

    // Strict decoding: rejects values >= MOD.
    static Fq from_bytes_be(std::span<const std::uint8_t> in) {
        if (in.size() != BYTES) throw std::invalid_argument("field element: bad length");
        Limbs<N> a{};
        for (std::size_t i = 0; i < BYTES; ++i)
            a[N - 1 - i / 8] |= (u64)in[i] << (56 - 8 * (i % 8));
        if (limb::cmp(a, MOD) >= 0) throw std::invalid_argument("field element: not canonical");
        return from_canonical(a);
    }

    // Reducing decoder for hash outputs: value mod MOD, big-endian input of
    // up to 2*BYTES bytes.
    static Fq from_bytes_be_reduce(std::span<const std::uint8_t> in) {
        Fq acc = zero();
        Fq shift = from_u64(256);
        for (std::uint8_t b : in) acc = acc * shift + from_u64(b);
        return acc;
    }

    // Raw Montgomery limbs, usable as a total order / hash key.
    constexpr const Limbs<N>& repr() const { return m_; }

private:
    Limbs<N> m_{};

    static constexpr Limbs<N> mont_mul(const Limbs<N>& a, const Limbs<N>& b) {
        Limbs<2 * N + 2> t{};
        for (std::size_t i = 0; i < N; ++i) {
            u64 carry = 0;
            for (std::size_t j = 0; j < N; ++j) t[i + j] = limb::mac(t[i + j], a[i], b[j], carry);
            u64 c2 = 0;
            t[i + N] = limb::adc(t[i + N], carry, c2);
            t[i + N + 1] += c2;
        }
        return mont_reduce_loop(t);
    }

    static constexpr Limbs<N> mont_reduce(Limbs<2 * N + 2> t) { return mont_reduce_loop(t); }

    static constexpr Limbs<N> mont_reduce_loop(Limbs<2 * N + 2>& t) {
        for (std::size_t i = 0; i < N; ++i) {
            u64 m = t[i] * INV;
            u64 carry = 0;
            (void)limb::mac(t[i], m, MOD[0], carry);
            for (std::size_t j = 1; j < N; ++j) t[i + j] = limb::mac(t[i + j], m, MOD[j], carry);
            u64 c2 = 0;
            t[i + N] = limb::adc(t[i + N], carry, c2);
            t[i + N + 1] += c2;
        }
        Limbs<N> r{};
        for (std::size_t i = 0; i < N; ++i) r[i] = t[i + N];
        if (t[2 * N] || limb::cmp(r, MOD) >= 0) limb::sub(r, MOD);
        return r;
    }
};

struct FpCfg {
    static constexpr std::size_t limbs = 6;
    static constexpr std::string_view modulus_hex =
        "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
        "1eabfffeb153ffffb9feffffffffaaab";
};

struct FrCfg {
    static constexpr std::size_t limbs = 4;
    static constexpr std::string_view modulus_hex =
        "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";
};

// Base field of BLS12-381 (381 bits) and its scalar field (255 bits).
using Fp = Fq<FpCfg>;
using Fr = Fq<FrCfg>;

// Montgomery batch inversion; zero entries stay zero.
template <class F>
inline void batch_inverse(std::vector<F>& xs) {
    std::vector<F> prefix(xs.size());
    F acc = F::one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        prefix[i] = acc;
        if (!xs[i].is_zero()) acc = acc * xs[i];
    }
    F inv = acc.inverse();
    for (std::size_t i = xs.size(); i-- > 0;) {
        if (xs[i].is_zero()) continue;
        F x = xs[i];
        xs[i] = inv * prefix[i];
        inv = inv * x;
    }
}

}  // namespace bmt
