#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bmt/algebra.hpp"
#include "bmt/polynomial.hpp"

namespace bmt {

// KZG-style commitment scheme: Setup / Commit / VerifyPoly / CreateWitness /
// VerifyEval plus constant-size batch openings over the vanishing polynomial.

struct PublicParams {
    std::uint32_t t = 0;                 // degree bound
    std::vector<G1Affine> g1_powers;     // g, g^a, ..., g^(a^t)
    std::vector<G2Affine> g2_powers;     // same powers in the verification group
    std::optional<Fr> test_trapdoor;     // test mode only, never serialized
};

// Deterministic test-mode setup; the trapdoor is derived from the seed and
// kept in the returned params for oracle checks.
PublicParams setup_test(std::uint32_t t, std::uint64_t seed);

void save_params(const PublicParams& pp, const std::string& path);

// Loads and fully validates a parameter file: canonical point encodings,
// generator anchors, and pairwise power consistency via a random
// linear-combination pairing check.
PublicParams load_params(const std::string& path);

struct Commitment {
    G1Affine point;
    bool operator==(const Commitment& o) const { return point == o.point; }
    std::array<std::uint8_t, 48> serialize() const { return serialize_g1(point); }
};

struct Witness {
    G1Affine point;
    bool operator==(const Witness& o) const { return point == o.point; }
    std::array<std::uint8_t, 48> serialize() const { return serialize_g1(point); }
};

struct Opening {
    Fr point;
    Fr value;
    Witness witness;
};

Commitment commit(const PublicParams& pp, const Poly& poly);

bool verify_poly(const PublicParams& pp, const Commitment& c, const Poly& poly);

Opening create_witness(const PublicParams& pp, const Poly& poly, const Fr& i);

bool verify_eval(const PublicParams& pp, const Commitment& c, const Fr& i, const Fr& value,
                 const Witness& w);

Witness create_batch_witness(const PublicParams& pp, const Poly& poly, std::span<const Fr> points);

bool verify_batch(const PublicParams& pp, const Commitment& c,
                  std::span<const std::pair<Fr, Fr>> opened, const Witness& w);

}  // namespace bmt
