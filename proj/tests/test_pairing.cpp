#include <doctest.h>

#include "test_util.hpp"

using namespace bmt;
using namespace bmt::testutil;

TEST_CASE("pairing is nondegenerate with order r") {
    GT e = pairing(G1Traits::generator(), G2Traits::generator());
    CHECK(!e.is_one());
    CHECK(e.pow(Fr::MOD).is_one());
}

TEST_CASE("bilinearity over 100 random scalar pairs") {
    std::mt19937_64 rng(9);
    G1 g = G1::from_affine(G1Traits::generator());
    G2 h = G2::from_affine(G2Traits::generator());
    GT e = pairing(G1Traits::generator(), G2Traits::generator());
    for (int i = 0; i < 100; ++i) {
        Fr a = rand_fr(rng), b = rand_fr(rng);
        GT lhs = pairing(g.mul(a).to_affine(), h.mul(b).to_affine());
        CHECK(lhs == e.pow((a * b).to_canonical()));
    }
}

TEST_CASE("pairing with the identity point is one") {
    CHECK(pairing(G1Affine::identity(), G2Traits::generator()).is_one());
    CHECK(pairing(G1Traits::generator(), G2Affine::identity()).is_one());
}

TEST_CASE("multi-pairing equals the product of pairings") {
    std::mt19937_64 rng(10);
    G1 g = G1::from_affine(G1Traits::generator());
    G2 h = G2::from_affine(G2Traits::generator());
    for (int i = 0; i < 5; ++i) {
        Fr a = rand_fr(rng), b = rand_fr(rng), c = rand_fr(rng), d = rand_fr(rng);
        G1Affine p1 = g.mul(a).to_affine(), p2 = g.mul(c).to_affine();
        G2Affine q1 = h.mul(b).to_affine(), q2 = h.mul(d).to_affine();
        std::pair<G1Affine, G2Affine> ps[2] = {{p1, q1}, {p2, q2}};
        GT prod = final_exponentiation(miller_loop_product(ps));
        CHECK(prod == pairing(p1, q1) * pairing(p2, q2));
        // cancellation: e(aP, Q) * e(-aP, Q) == 1
        std::pair<G1Affine, G2Affine> cancel[2] = {
            {p1, q1}, {G1::from_affine(p1).negate().to_affine(), q1}};
        CHECK(pairing_product_is_one(cancel));
    }
}
