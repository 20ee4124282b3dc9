#pragma once

#include <utility>

#include "bmt/curve.hpp"

namespace bmt {

// Optimal ate pairing e : G1 x G2 -> GT for BLS12-381.

using GT = Fp12;

Fp12 miller_loop(const G1Affine& p, const G2Affine& q);

// Product of Miller loops sharing the squaring chain.
Fp12 miller_loop_product(std::span<const std::pair<G1Affine, G2Affine>> pairs);

Fp12 final_exponentiation(const Fp12& f);

GT pairing(const G1Affine& p, const G2Affine& q);

// Checks prod e(p_i, q_i) == 1 with a single final exponentiation.
bool pairing_product_is_one(std::span<const std::pair<G1Affine, G2Affine>> pairs);

}  // namespace bmt
