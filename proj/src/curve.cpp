#include "bmt/curve.hpp"

#include <stdexcept>

namespace bmt {

namespace {

constexpr std::string_view kG1X =
    "17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb";
constexpr std::string_view kG1Y =
    "08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3edd03cc744a2888ae40caa232946c5e7e1";
constexpr std::string_view kG2X0 =
    "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8";
constexpr std::string_view kG2X1 =
    "13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e";
constexpr std::string_view kG2Y0 =
    "0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d12c923ac9cc3baca289e193548608b82801";
constexpr std::string_view kG2Y1 =
    "0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99ab3f370d275cec1da1aaa9075ff05f79be";

Fp fp_from_hex(std::string_view s) { return Fp::from_canonical(limb::from_hex<6>(s)); }

// y is "lexicographically largest" when y > p - y as integers.
bool y_is_largest(const Fp& y) {
    Fp neg = -y;
    return limb::cmp(y.to_canonical(), neg.to_canonical()) > 0;
}

bool y_is_largest(const Fp2& y) {
    Fp2 neg = -y;
    Limbs<6> a1 = y.c1.to_canonical(), b1 = neg.c1.to_canonical();
    int c = limb::cmp(a1, b1);
    if (c != 0) return c > 0;
    return limb::cmp(y.c0.to_canonical(), neg.c0.to_canonical()) > 0;
}

template <class Traits>
bool in_subgroup(const Affine<Traits>& p) {
    return Proj<Traits>::from_affine(p).mul(Fr::MOD).is_identity();
}

}  // namespace

G1Affine G1Traits::generator() {
    return G1Affine{fp_from_hex(kG1X), fp_from_hex(kG1Y), false};
}

G2Affine G2Traits::generator() {
    return G2Affine{Fp2{fp_from_hex(kG2X0), fp_from_hex(kG2X1)},
                    Fp2{fp_from_hex(kG2Y0), fp_from_hex(kG2Y1)}, false};
}

std::array<std::uint8_t, 48> serialize_g1(const G1Affine& p) {
    std::array<std::uint8_t, 48> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    p.x.to_bytes_be(out);
    out[0] |= 0x80;
    if (y_is_largest(p.y)) out[0] |= 0x20;
    return out;
}

std::array<std::uint8_t, 96> serialize_g2(const G2Affine& p) {
    std::array<std::uint8_t, 96> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    p.x.c1.to_bytes_be(std::span<std::uint8_t>(out.data(), 48));
    p.x.c0.to_bytes_be(std::span<std::uint8_t>(out.data() + 48, 48));
    out[0] |= 0x80;
    if (y_is_largest(p.y)) out[0] |= 0x20;
    return out;
}

namespace {

struct Flags {
    bool infinity;
    bool sort;
};

Flags parse_flags(std::span<const std::uint8_t> in, std::size_t expect) {
    if (in.size() != expect) throw std::invalid_argument("point: bad length");
    std::uint8_t top = in[0];
    if (!(top & 0x80)) throw std::invalid_argument("point: uncompressed encoding not supported");
    bool inf = top & 0x40;
    bool sort = top & 0x20;
    if (inf) {
        if (sort) throw std::invalid_argument("point: malformed infinity");
        std::uint8_t acc = top & 0x1f;
        for (std::size_t i = 1; i < in.size(); ++i) acc |= in[i];
        if (acc) throw std::invalid_argument("point: malformed infinity");
    }
    return {inf, sort};
}

}  // namespace

G1Affine deserialize_g1(std::span<const std::uint8_t> in) {
    Flags f = parse_flags(in, 48);
    if (f.infinity) return G1Affine::identity();
    std::array<std::uint8_t, 48> xb{};
    std::copy(in.begin(), in.end(), xb.begin());
    xb[0] &= 0x1f;
    Fp x = Fp::from_bytes_be(xb);
    Fp rhs = x.square() * x + G1Traits::b();
    Fp y = rhs.sqrt_3mod4();
    if (y.square() != rhs) throw std::invalid_argument("g1: x not on curve");
    if (y_is_largest(y) != f.sort) y = -y;
    G1Affine p{x, y, false};
    if (!in_subgroup(p)) throw std::invalid_argument("g1: not in prime-order subgroup");
    return p;
}

G2Affine deserialize_g2(std::span<const std::uint8_t> in) {
    Flags f = parse_flags(in, 96);
    if (f.infinity) return G2Affine::identity();
    std::array<std::uint8_t, 48> c1b{}, c0b{};
    std::copy(in.begin(), in.begin() + 48, c1b.begin());
    std::copy(in.begin() + 48, in.end(), c0b.begin());
    c1b[0] &= 0x1f;
    Fp2 x{Fp::from_bytes_be(c0b), Fp::from_bytes_be(c1b)};
    Fp2 rhs = x.square() * x + G2Traits::b();
    Fp2 y = rhs.sqrt();
    if (y.square() != rhs) throw std::invalid_argument("g2: x not on curve");
    if (y_is_largest(y) != f.sort) y = -y;
    G2Affine p{x, y, false};
    if (!in_subgroup(p)) throw std::invalid_argument("g2: not in prime-order subgroup");
    return p;
}

}  // namespace bmt
