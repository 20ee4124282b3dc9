#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmt/fp_tower.hpp"

namespace bmt {

// Short Weierstrass y^2 = x^3 + b over F, homogeneous projective coordinates.
// G1 lives over Fp (b = 4), G2 over Fp2 (b = 4(u+1), the M-twist).

template <class Traits>
struct Affine {
    using F = typename Traits::Field;
    F x{}, y{};
    bool infinity = true;

    static Affine identity() { return Affine{}; }

    bool operator==(const Affine& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }

    bool on_curve() const {
        if (infinity) return true;
        return y.square() == x.square() * x + Traits::b();
    }
};

template <class Traits>
struct Proj {
    using F = typename Traits::Field;
    using Aff = Affine<Traits>;
    F X = F::zero(), Y = F::one(), Z = F::zero();

    static Proj identity() { return Proj{}; }

    static Proj from_affine(const Aff& a) {
        if (a.infinity) return identity();
        return Proj{a.x, a.y, F::one()};
    }

    bool is_identity() const { return Z.is_zero(); }

    Aff to_affine() const {
        if (is_identity()) return Aff::identity();
        F zi = Z.inverse();
        return Aff{X * zi, Y * zi, false};
    }

    Proj dbl() const {
        if (is_identity()) return identity();
        F w = X.square();
        w = w + w + w;                    // 3X^2
        F s = Y * Z;
        if (s.is_zero()) return identity();
        F B = X * Y * s;
        F B8 = B.dbl().dbl().dbl();
        F h = w.square() - B8;
        F s2 = s.square();
        Proj r;
        r.X = (h * s).dbl();
        r.Y = w * (B.dbl().dbl() - h) - (Y.square() * s2).dbl().dbl().dbl();
        r.Z = (s2 * s).dbl().dbl().dbl();
        return r;
    }

    Proj add(const Proj& o) const {
        if (is_identity()) return o;
        if (o.is_identity()) return *this;
        F u = o.Y * Z - Y * o.Z;
        F v = o.X * Z - X * o.Z;
        if (v.is_zero()) {
            if (u.is_zero()) return dbl();
            return identity();
        }
        F zz = Z * o.Z;
        F vv = v.square();
        F vvv = vv * v;
        F R = vv * X * o.Z;
        F A = u.square() * zz - vvv - R.dbl();
        Proj r;
        r.X = v * A;
        r.Y = u * (R - A) - vvv * Y * o.Z;
        r.Z = vvv * zz;
        return r;
    }

    Proj add_mixed(const Aff& o) const {
        if (o.infinity) return *this;
        if (is_identity()) return from_affine(o);
        F u = o.y * Z - Y;
        F v = o.x * Z - X;
        if (v.is_zero()) {
            if (u.is_zero()) return dbl();
            return identity();
        }
        F vv = v.square();
        F vvv = vv * v;
        F R = vv * X;
        F A = u.square() * Z - vvv - R.dbl();
        Proj r;
        r.X = v * A;
        r.Y = u * (R - A) - vvv * Y;
        r.Z = vvv * Z;
        return r;
    }

    Proj negate() const { return Proj{X, -Y, Z}; }

    bool operator==(const Proj& o) const {
        bool i1 = is_identity(), i2 = o.is_identity();
        if (i1 || i2) return i1 == i2;
        return X * o.Z == o.X * Z && Y * o.Z == o.Y * Z;
    }

    template <std::size_t M>
    Proj mul(const Limbs<M>& k) const {
        Proj acc = identity();
        std::size_t nbits = limb::bit_length(k);
        for (std::size_t i = nbits; i-- > 0;) {
            acc = acc.dbl();
            if (limb::bit(k, i)) acc = acc.add(*this);
        }
        return acc;
    }

    Proj mul(const Fr& k) const { return mul(k.to_canonical()); }
};

struct G1Traits {
    using Field = Fp;
    static constexpr std::size_t compressed_size = 48;
    static Field b() { return Fp::from_u64(4); }
    static Affine<G1Traits> generator();
};

struct G2Traits {
    using Field = Fp2;
    static constexpr std::size_t compressed_size = 96;
    static Field b() { return Fp2{Fp::from_u64(4), Fp::from_u64(4)}; }
    static Affine<G2Traits> generator();
};

using G1Affine = Affine<G1Traits>;
using G1 = Proj<G1Traits>;
using G2Affine = Affine<G2Traits>;
using G2 = Proj<G2Traits>;

// ZCash-convention compressed encodings: big-endian x with flag bits in the
// top byte (0x80 compressed, 0x40 infinity, 0x20 lexicographically-largest y).
std::array<std::uint8_t, 48> serialize_g1(const G1Affine& p);
std::array<std::uint8_t, 96> serialize_g2(const G2Affine& p);

// Strict decoders: canonical field encodings, on-curve and prime-order
// subgroup membership are all enforced.
G1Affine deserialize_g1(std::span<const std::uint8_t> in);
G2Affine deserialize_g2(std::span<const std::uint8_t> in);

template <class Traits>
std::vector<Affine<Traits>> batch_normalize(const std::vector<Proj<Traits>>& pts) {
    using F = typename Traits::Field;
    std::vector<F> zs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) zs[i] = pts[i].Z;
    batch_inverse(zs);
    std::vector<Affine<Traits>> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_identity()) continue;
        out[i] = Affine<Traits>{pts[i].X * zs[i], pts[i].Y * zs[i], false};
    }
    return out;
}

// Pippenger bucket MSM; empty input yields the identity.
template <class Traits>
Proj<Traits> msm(std::span<const Affine<Traits>> bases, std::span<const Fr> scalars) {
    if (bases.size() != scalars.size()) throw std::invalid_argument("msm: length mismatch");
    using P = Proj<Traits>;
    if (bases.empty()) return P::identity();
    std::size_t n = bases.size();
    if (n < 8) {
        P acc = P::identity();
        for (std::size_t i = 0; i < n; ++i)
            acc = acc.add(P::from_affine(bases[i]).mul(scalars[i]));
        return acc;
    }
    std::size_t c = 3;
    while ((std::size_t(1) << (c + 2)) < n && c < 12) ++c;
    std::vector<Limbs<4>> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = scalars[i].to_canonical();
    const std::size_t windows = (256 + c - 1) / c;
    std::vector<P> buckets((std::size_t(1) << c) - 1);
    P acc = P::identity();
    for (std::size_t w = windows; w-- > 0;) {
        for (std::size_t i = 0; i < c; ++i) acc = acc.dbl();
        for (auto& b : buckets) b = P::identity();
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t lo = w * c;
            std::size_t idx = 0;
            for (std::size_t j = 0; j < c; ++j) {
                std::size_t pos = lo + j;
                if (pos < 256 && limb::bit(ks[i], pos)) idx |= std::size_t(1) << j;
            }
            if (idx) buckets[idx - 1] = buckets[idx - 1].add_mixed(bases[i]);
        }
        P running = P::identity();
        P sum = P::identity();
        for (std::size_t b = buckets.size(); b-- > 0;) {
            running = running.add(buckets[b]);
            sum = sum.add(running);
        }
        acc = acc.add(sum);
    }
    return acc;
}

}  // namespace bmt
