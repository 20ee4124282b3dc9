#include "bmt/pairing.hpp"

#include <vector>

namespace bmt {

namespace {

// |x| for the BLS parameter x = -0xd201000000010000
constexpr u64 kAbsX = 0xd201000000010000ULL;

struct G2Proj {
    Fp2 X, Y, Z;
};

struct LineEval {
    Fp2 a0, a3, a5;  // sparse positions w^0, w^3, w^5
};

// Tangent line at T evaluated at P, with the M-twist untwisting folded in;
// scaled by an Fp2 constant that the final exponentiation kills.
LineEval dbl_step(G2Proj& t, const Fp& xp, const Fp& yp) {
    Fp2 w3 = t.X.square();
    w3 = w3 + w3 + w3;
    Fp2 s = t.Y * t.Z;
    Fp2 yy = t.Y.square();

    LineEval l;
    l.a0 = (s * t.Z).dbl().scale(yp).mul_by_nonresidue();
    l.a3 = w3 * t.X - (yy * t.Z).dbl();
    l.a5 = -(w3 * t.Z).scale(xp);

    Fp2 b = t.X * t.Y * s;
    Fp2 b8 = b.dbl().dbl().dbl();
    Fp2 h = w3.square() - b8;
    Fp2 s2 = s.square();
    G2Proj r;
    r.X = (h * s).dbl();
    r.Y = w3 * (b.dbl().dbl() - h) - (yy * s2).dbl().dbl().dbl();
    r.Z = (s2 * s).dbl().dbl().dbl();
    t = r;
    return l;
}

// Chord through T and affine Q evaluated at P.
LineEval add_step(G2Proj& t, const G2Affine& q, const Fp& xp, const Fp& yp) {
    Fp2 u = q.y * t.Z - t.Y;
    Fp2 v = q.x * t.Z - t.X;

    LineEval l;
    l.a0 = v.scale(yp).mul_by_nonresidue();
    l.a3 = u * q.x - v * q.y;
    l.a5 = -u.scale(xp);

    Fp2 vv = v.square();
    Fp2 vvv = vv * v;
    Fp2 r0 = vv * t.X;
    Fp2 a = u.square() * t.Z - vvv - r0.dbl();
    G2Proj r;
    r.X = v * a;
    r.Y = u * (r0 - a) - vvv * t.Y;
    r.Z = vvv * t.Z;
    t = r;
    return l;
}

// g^|x| by plain square-and-multiply over the sparse parameter.
Fp12 pow_abs_x(const Fp12& g) {
    Fp12 acc = g;
    for (int i = 62; i >= 0; --i) {
        acc = acc.square();
        if ((kAbsX >> i) & 1) acc = acc * g;
    }
    return acc;
}

// g^x for unitary g (x negative: conjugate is the inverse).
Fp12 pow_x(const Fp12& g) { return pow_abs_x(g).conjugate(); }

}  // namespace

Fp12 miller_loop_product(std::span<const std::pair<G1Affine, G2Affine>> pairs) {
    struct Slot {
        Fp xp, yp;
        G2Affine q;
        G2Proj t;
    };
    std::vector<Slot> slots;
    slots.reserve(pairs.size());
    for (const auto& [p, q] : pairs) {
        if (p.infinity || q.infinity) continue;
        slots.push_back({p.x, p.y, q, {q.x, q.y, Fp2::one()}});
    }
    Fp12 f = Fp12::one();
    if (slots.empty()) return f;
    for (int i = 62; i >= 0; --i) {
        f = f.square();
        for (auto& s : slots) {
            LineEval l = dbl_step(s.t, s.xp, s.yp);
            f = f.mul_by_line(l.a0, l.a3, l.a5);
        }
        if ((kAbsX >> i) & 1) {
            for (auto& s : slots) {
                LineEval l = add_step(s.t, s.q, s.xp, s.yp);
                f = f.mul_by_line(l.a0, l.a3, l.a5);
            }
        }
    }
    // x < 0
    return f.conjugate();
}

Fp12 miller_loop(const G1Affine& p, const G2Affine& q) {
    std::pair<G1Affine, G2Affine> one[1] = {{p, q}};
    return miller_loop_product(one);
}

Fp12 final_exponentiation(const Fp12& f) {
    // easy part: f^((p^6-1)(p^2+1))
    Fp12 t = f.conjugate() * f.inverse();
    Fp12 m = t.frobenius_sq() * t;
    // hard part: m^(3(p^4-p^2+1)/r) via
    // 3(p^4-p^2+1)/r = (x-1)^2 (x+p) (x^2+p^2-1) + 3
    Fp12 a = pow_x(m) * m.conjugate();
    Fp12 b = pow_x(a) * a.conjugate();
    Fp12 c = pow_x(b) * b.frobenius();
    Fp12 cx2 = pow_abs_x(pow_abs_x(c));
    Fp12 e = cx2 * c.frobenius_sq() * c.conjugate();
    return e * m * m.square();
}

GT pairing(const G1Affine& p, const G2Affine& q) {
    return final_exponentiation(miller_loop(p, q));
}

bool pairing_product_is_one(std::span<const std::pair<G1Affine, G2Affine>> pairs) {
    return final_exponentiation(miller_loop_product(pairs)).is_one();
}

}  // namespace bmt
