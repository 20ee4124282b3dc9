#include "bmt/fp_tower.hpp"

namespace bmt {

namespace {

// gamma1[k] = xi^(k*(p-1)/6), gamma2[k] = xi^(k*(p^2-1)/6), xi = u+1.
// Computed once at first use; avoids hardcoded tower constants.
struct FrobCtx {
    Fp2 gamma1[6];
    Fp2 gamma2[6];

    FrobCtx() {
        Limbs<6> e1 = Fp::MOD;
        Limbs<6> one{};
        one[0] = 1;
        limb::sub(e1, one);
        limb::div_small(e1, 6);

        Limbs<12> e2 = limb::mul_wide(Fp::MOD, Fp::MOD);
        Limbs<12> one12{};
        one12[0] = 1;
        limb::sub(e2, one12);
        limb::div_small(e2, 6);

        Fp2 xi{Fp::one(), Fp::one()};
        Fp2 x1 = xi.pow(e1);
        Fp2 x2 = xi.pow(e2);
        gamma1[0] = Fp2::one();
        gamma2[0] = Fp2::one();
        for (int k = 1; k < 6; ++k) {
            gamma1[k] = gamma1[k - 1] * x1;
            gamma2[k] = gamma2[k - 1] * x2;
        }
    }
};

const FrobCtx& frob_ctx() {
    static const FrobCtx ctx;
    return ctx;
}

}  // namespace

Fp12 Fp12::frobenius() const {
    const FrobCtx& f = frob_ctx();
    // w-basis coefficients: w^k for k = 0..5
    const Fp2* a[6] = {&c0.c0, &c1.c0, &c0.c1, &c1.c1, &c0.c2, &c1.c2};
    Fp2 r[6];
    for (int k = 0; k < 6; ++k) r[k] = a[k]->conjugate() * f.gamma1[k];
    return {{r[0], r[2], r[4]}, {r[1], r[3], r[5]}};
}

Fp12 Fp12::frobenius_sq() const {
    const FrobCtx& f = frob_ctx();
    const Fp2* a[6] = {&c0.c0, &c1.c0, &c0.c1, &c1.c1, &c0.c2, &c1.c2};
    Fp2 r[6];
    for (int k = 0; k < 6; ++k) r[k] = *a[k] * f.gamma2[k];
    return {{r[0], r[2], r[4]}, {r[1], r[3], r[5]}};
}

}  // namespace bmt
