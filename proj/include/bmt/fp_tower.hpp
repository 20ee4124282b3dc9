#pragma once

#include "bmt/field.hpp"

namespace bmt {

// Tower for BLS12-381: Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3 - (u+1)),
// Fp12 = Fp6[w]/(w^2 - v).

struct Fp2 {
    Fp c0, c1;

    static constexpr Fp2 zero() { return {Fp::zero(), Fp::zero()}; }
    static constexpr Fp2 one() { return {Fp::one(), Fp::zero()}; }

    constexpr bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    constexpr bool operator==(const Fp2& o) const { return c0 == o.c0 && c1 == o.c1; }
    constexpr bool operator!=(const Fp2& o) const { return !(*this == o); }

    constexpr Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
    constexpr Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
    constexpr Fp2 operator-() const { return {-c0, -c1}; }

    constexpr Fp2 operator*(const Fp2& o) const {
        // Karatsuba with u^2 = -1
        Fp t0 = c0 * o.c0;
        Fp t1 = c1 * o.c1;
        Fp t2 = (c0 + c1) * (o.c0 + o.c1);
        return {t0 - t1, t2 - t0 - t1};
    }

    constexpr Fp2 square() const {
        Fp a = c0 + c1;
        Fp b = c0 - c1;
        Fp t = c0 * c1;
        return {a * b, t + t};
    }

    constexpr Fp2 scale(const Fp& k) const { return {c0 * k, c1 * k}; }

    constexpr Fp2 dbl() const { return {c0 + c0, c1 + c1}; }

    constexpr Fp2 conjugate() const { return {c0, -c1}; }

    // multiplication by the Fp6 non-residue xi = u + 1
    constexpr Fp2 mul_by_nonresidue() const { return {c0 - c1, c0 + c1}; }

    constexpr Fp2 inverse() const {
        Fp norm = c0.square() + c1.square();
        Fp inv = norm.inverse();
        return {c0 * inv, -(c1 * inv)};
    }

    template <std::size_t M>
    constexpr Fp2 pow(const Limbs<M>& e) const {
        Fp2 acc = one();
        std::size_t nbits = limb::bit_length(e);
        for (std::size_t i = nbits; i-- > 0;) {
            acc = acc.square();
            if (limb::bit(e, i)) acc = acc * *this;
        }
        return acc;
    }

    bool is_square() const {
        // norm must be a square in Fp
        return (c0.square() + c1.square()).is_square();
    }

    // Square root via the norm trick (p == 3 mod 4); caller checks result.
    Fp2 sqrt() const {
        if (is_zero()) return zero();
        if (c1.is_zero()) {
            if (c0.is_square()) {
                Fp r = c0.sqrt_3mod4();
                return {r, Fp::zero()};
            }
            // sqrt(c0) = u * sqrt(-c0)
            Fp r = (-c0).sqrt_3mod4();
            return {Fp::zero(), r};
        }
        Fp lambda = (c0.square() + c1.square()).sqrt_3mod4();
        Fp half = Fp::from_u64(2).inverse();
        Fp delta = (c0 + lambda) * half;
        if (!delta.is_square()) delta = (c0 - lambda) * half;
        Fp x0 = delta.sqrt_3mod4();
        if (x0.is_zero()) return zero();
        Fp x1 = c1 * half * x0.inverse();
        return {x0, x1};
    }
};

struct Fp6 {
    Fp2 c0, c1, c2;

    static constexpr Fp6 zero() { return {Fp2::zero(), Fp2::zero(), Fp2::zero()}; }
    static constexpr Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

    constexpr bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    constexpr bool operator==(const Fp6& o) const { return c0 == o.c0 && c1 == o.c1 && c2 == o.c2; }

    constexpr Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    constexpr Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    constexpr Fp6 operator-() const { return {-c0, -c1, -c2}; }

    constexpr Fp6 operator*(const Fp6& o) const {
        Fp2 t0 = c0 * o.c0;
        Fp2 t1 = c1 * o.c1;
        Fp2 t2 = c2 * o.c2;
        Fp2 r0 = t0 + ((c1 + c2) * (o.c1 + o.c2) - t1 - t2).mul_by_nonresidue();
        Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - t0 - t1 + t2.mul_by_nonresidue();
        Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - t0 - t2 + t1;
        return {r0, r1, r2};
    }

    constexpr Fp6 square() const { return *this * *this; }

    // multiply by v (the cubic generator): (c0,c1,c2) -> (xi*c2, c0, c1)
    constexpr Fp6 mul_by_v() const { return {c2.mul_by_nonresidue(), c0, c1}; }

    constexpr Fp6 scale(const Fp2& k) const { return {c0 * k, c1 * k, c2 * k}; }

    constexpr Fp6 inverse() const {
        Fp2 a = c0.square() - (c1 * c2).mul_by_nonresidue();
        Fp2 b = c2.square().mul_by_nonresidue() - c0 * c1;
        Fp2 c = c1.square() - c0 * c2;
        Fp2 t = ((c2 * b + c1 * c).mul_by_nonresidue() + c0 * a).inverse();
        return {a * t, b * t, c * t};
    }
};

struct Fp12 {
    Fp6 c0, c1;

    static constexpr Fp12 zero() { return {Fp6::zero(), Fp6::zero()}; }
    static constexpr Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

    constexpr bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    constexpr bool is_one() const { return *this == one(); }
    constexpr bool operator==(const Fp12& o) const { return c0 == o.c0 && c1 == o.c1; }
    constexpr bool operator!=(const Fp12& o) const { return !(*this == o); }

    constexpr Fp12 operator+(const Fp12& o) const { return {c0 + o.c0, c1 + o.c1}; }
    constexpr Fp12 operator-(const Fp12& o) const { return {c0 - o.c0, c1 - o.c1}; }

    constexpr Fp12 operator*(const Fp12& o) const {
        Fp6 t0 = c0 * o.c0;
        Fp6 t1 = c1 * o.c1;
        Fp6 r1 = (c0 + c1) * (o.c0 + o.c1) - t0 - t1;
        return {t0 + t1.mul_by_v(), r1};
    }

    constexpr Fp12 square() const {
        // complex squaring over Fp6 with w^2 = v
        Fp6 a = c0 + c1;
        Fp6 b = c0 + c1.mul_by_v();
        Fp6 t = c0 * c1;
        Fp6 r0 = a * b - t - t.mul_by_v();
        return {r0, t + t};
    }

    // w-conjugation == Frobenius^6 == unitary inverse for cyclotomic elements
    constexpr Fp12 conjugate() const { return {c0, -c1}; }

    constexpr Fp12 inverse() const {
        Fp6 t = (c0.square() - c1.square().mul_by_v()).inverse();
        return {c0 * t, -(c1 * t)};
    }

    // Sparse line multiplication: line = a0 + a3*w^3 + a5*w^5 in the
    // flattened w-basis, i.e. first Fp6 = (a0,0,0), second = (0,a3,a5).
    constexpr Fp12 mul_by_line(const Fp2& a0, const Fp2& a3, const Fp2& a5) const {
        Fp12 l{{a0, Fp2::zero(), Fp2::zero()}, {Fp2::zero(), a3, a5}};
        return *this * l;
    }

    Fp12 frobenius() const;
    Fp12 frobenius_sq() const;

    template <std::size_t M>
    constexpr Fp12 pow(const Limbs<M>& e) const {
        Fp12 acc = one();
        std::size_t nbits = limb::bit_length(e);
        for (std::size_t i = nbits; i-- > 0;) {
            acc = acc.square();
            if (limb::bit(e, i)) acc = acc * *this;
        }
        return acc;
    }
};

}  // namespace bmt
