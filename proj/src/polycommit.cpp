#include "bmt/polycommit.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace bmt {

namespace {

constexpr char kMagic[8] = {'B', 'M', 'T', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint8_t kVersion = 1;

Fr derive_trapdoor(std::uint64_t seed) {
    std::uint8_t buf[16]{};
    for (int i = 0; i < 8; ++i) buf[i] = (std::uint8_t)(seed >> (8 * i));
    for (std::uint64_t ctr = 0;; ++ctr) {
        for (int i = 0; i < 8; ++i) buf[8 + i] = (std::uint8_t)(ctr >> (8 * i));
        Fr a = hash_to_scalar(std::span<const std::uint8_t>(buf, 16));
        if (!a.is_zero()) return a;
    }
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((std::uint8_t)(v >> (8 * i)));
}

Fr rand_fr(std::mt19937_64& rng) {
    Limbs<4> l{};
    do {
        for (auto& x : l) x = rng();
    } while (limb::cmp(l, Fr::MOD) >= 0);
    return Fr::from_canonical(l);
}

int checked_degree(const PublicParams& pp, const Poly& poly) {
    int d = poly.degree();
    if (d > (int)pp.t) throw std::invalid_argument("polynomial degree exceeds degree bound t");
    return d;
}

}  // namespace

PublicParams setup_test(std::uint32_t t, std::uint64_t seed) {
    if (t < 1) throw std::invalid_argument("setup: t must be >= 1");
    Fr alpha = derive_trapdoor(seed);
    PublicParams pp;
    pp.t = t;
    pp.test_trapdoor = alpha;

    std::vector<G1> p1(t + 1);
    std::vector<G2> p2(t + 1);
    G1 acc1 = G1::from_affine(G1Traits::generator());
    G2 acc2 = G2::from_affine(G2Traits::generator());
    for (std::uint32_t j = 0; j <= t; ++j) {
        p1[j] = acc1;
        p2[j] = acc2;
        if (j < t) {
            acc1 = acc1.mul(alpha);
            acc2 = acc2.mul(alpha);
        }
    }
    pp.g1_powers = batch_normalize<G1Traits>(p1);
    pp.g2_powers = batch_normalize<G2Traits>(p2);
    return pp;
}

void save_params(const PublicParams& pp, const std::string& path) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 8);
    out.push_back(kVersion);
    append_u32(out, pp.t);
    append_u32(out, (std::uint32_t)pp.g1_powers.size());
    for (const auto& p : pp.g1_powers) {
        auto b = serialize_g1(p);
        out.insert(out.end(), b.begin(), b.end());
    }
    append_u32(out, (std::uint32_t)pp.g2_powers.size());
    for (const auto& p : pp.g2_powers) {
        auto b = serialize_g2(p);
        out.insert(out.end(), b.begin(), b.end());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open params file for writing: " + path);
    f.write((const char*)out.data(), (std::streamsize)out.size());
    if (!f) throw std::runtime_error("short write to params file: " + path);
}

PublicParams load_params(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open params file: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (pos + n > data.size()) throw std::runtime_error("params file truncated");
    };
    need(8);
    if (std::memcmp(data.data(), kMagic, 8) != 0)
        throw std::runtime_error("params file: bad magic");
    pos = 8;
    need(1);
    if (data[pos++] != kVersion) throw std::runtime_error("params file: unsupported version");
    auto read_u32 = [&]() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= (std::uint32_t)data[pos + i] << (8 * i);
        pos += 4;
        return v;
    };
    PublicParams pp;
    pp.t = read_u32();
    if (pp.t < 1 || pp.t > (1u << 20)) throw std::runtime_error("params file: implausible t");
    std::uint32_t n1 = read_u32();
    if (n1 != pp.t + 1) throw std::runtime_error("params file: wrong g1 power count");
    pp.g1_powers.reserve(n1);
    for (std::uint32_t i = 0; i < n1; ++i) {
        need(48);
        pp.g1_powers.push_back(deserialize_g1({data.data() + pos, 48}));
        pos += 48;
    }
    std::uint32_t n2 = read_u32();
    if (n2 < 2 || n2 > pp.t + 1) throw std::runtime_error("params file: wrong g2 power count");
    pp.g2_powers.reserve(n2);
    for (std::uint32_t i = 0; i < n2; ++i) {
        need(96);
        pp.g2_powers.push_back(deserialize_g2({data.data() + pos, 96}));
        pos += 96;
    }
    if (pos != data.size()) throw std::runtime_error("params file: trailing bytes");

    if (!(pp.g1_powers[0] == G1Traits::generator()) ||
        !(pp.g2_powers[0] == G2Traits::generator()))
        throw std::runtime_error("params file: power 0 is not the generator");
    if (pp.g1_powers.size() > 1 && pp.g2_powers.size() > 1) {
        std::pair<G1Affine, G2Affine> cross[2] = {
            {pp.g1_powers[1], pp.g2_powers[0]},
            {G1::from_affine(pp.g1_powers[0]).negate().to_affine(), pp.g2_powers[1]}};
        if (!pairing_product_is_one(cross))
            throw std::runtime_error("params file: g1/g2 trapdoor mismatch");
    }

    // Random linear combination check of e(P_{j-1}, Q_1) == e(P_j, Q_0).
    std::mt19937_64 rng{std::random_device{}()};
    {
        std::size_t m = pp.g1_powers.size() - 1;
        std::vector<Fr> rho(m);
        for (auto& r : rho) r = rand_fr(rng);
        G1 low = multi_scalar_mul(std::span(pp.g1_powers.data(), m), rho);
        G1 high = multi_scalar_mul(std::span(pp.g1_powers.data() + 1, m), rho);
        std::pair<G1Affine, G2Affine> pairs[2] = {
            {low.to_affine(), pp.g2_powers[1]},
            {high.negate().to_affine(), pp.g2_powers[0]}};
        if (!pairing_product_is_one(pairs))
            throw std::runtime_error("params file: inconsistent g1 powers");
    }
    if (pp.g2_powers.size() > 2) {
        std::size_t m = pp.g2_powers.size() - 1;
        std::vector<Fr> rho(m);
        for (auto& r : rho) r = rand_fr(rng);
        G2 low = multi_scalar_mul(std::span(pp.g2_powers.data(), m), rho);
        G2 high = multi_scalar_mul(std::span(pp.g2_powers.data() + 1, m), rho);
        std::pair<G1Affine, G2Affine> pairs[2] = {
            {pp.g1_powers[1], low.to_affine()},
            {G1::from_affine(pp.g1_powers[0]).negate().to_affine(), high.to_affine()}};
        if (!pairing_product_is_one(pairs))
            throw std::runtime_error("params file: inconsistent g2 powers");
    }
    return pp;
}

Commitment commit(const PublicParams& pp, const Poly& poly) {
    int d = checked_degree(pp, poly);
    if (d < 0) return Commitment{G1Affine::identity()};
    std::span<const Fr> coeffs(poly.c.data(), (std::size_t)d + 1);
    std::span<const G1Affine> bases(pp.g1_powers.data(), (std::size_t)d + 1);
    return Commitment{multi_scalar_mul(bases, coeffs).to_affine()};
}

bool verify_poly(const PublicParams& pp, const Commitment& c, const Poly& poly) {
    return commit(pp, poly) == c;
}

Opening create_witness(const PublicParams& pp, const Poly& poly, const Fr& i) {
    checked_degree(pp, poly);
    Fr value = poly.eval(i);
    Poly shifted = poly;
    if (shifted.c.empty()) shifted.c.push_back(Fr::zero());
    shifted.c[0] -= value;
    auto [quot, rem] = divide_linear(shifted, i);
    if (!rem.is_zero()) throw std::logic_error("create_witness: nonzero division remainder");
    return Opening{i, value, Witness{commit(pp, quot).point}};
}

bool verify_eval(const PublicParams& pp, const Commitment& c, const Fr& i, const Fr& value,
                 const Witness& w) {
    // e(C / g^value, g2) == e(w, g2^a / g2^i)
    G1 lhs = G1::from_affine(c.point)
                 .add(G1::from_affine(pp.g1_powers[0]).mul(value).negate());
    G2 rhs = G2::from_affine(pp.g2_powers[1])
                 .add(G2::from_affine(pp.g2_powers[0]).mul(i).negate());
    std::pair<G1Affine, G2Affine> pairs[2] = {
        {lhs.to_affine(), pp.g2_powers[0]},
        {G1::from_affine(w.point).negate().to_affine(), rhs.to_affine()}};
    return pairing_product_is_one(pairs);
}

Witness create_batch_witness(const PublicParams& pp, const Poly& poly,
                             std::span<const Fr> points) {
    checked_degree(pp, poly);
    if (points.empty()) throw std::invalid_argument("batch witness: no points");
    if (points.size() > pp.t + 1) throw std::invalid_argument("batch witness: too many points");
    std::vector<std::pair<Fr, Fr>> evals(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) evals[i] = {points[i], poly.eval(points[i])};
    Poly r = interpolate(evals);  // also rejects duplicate points
    Poly num = poly - r;
    for (const Fr& m : points) {
        auto [q, rem] = divide_linear(num, m);
        if (!rem.is_zero()) throw std::logic_error("batch witness: nonzero division remainder");
        num = std::move(q);
    }
    return Witness{commit(pp, num).point};
}

bool verify_batch(const PublicParams& pp, const Commitment& c,
                  std::span<const std::pair<Fr, Fr>> opened, const Witness& w) {
    if (opened.empty()) throw std::invalid_argument("verify_batch: no openings");
    if (opened.size() >= pp.g2_powers.size())
        throw std::invalid_argument("verify_batch: batch larger than verification-key powers");
    std::vector<Fr> xs(opened.size());
    for (std::size_t i = 0; i < opened.size(); ++i) xs[i] = opened[i].first;
    Poly r = interpolate(opened);  // rejects duplicate x
    Poly z = vanishing_poly(xs);

    G1 cr = G1::identity();
    if (!r.is_zero()) cr = G1::from_affine(commit(pp, r).point);
    G1 lhs = G1::from_affine(c.point).add(cr.negate());
    std::span<const G2Affine> bases(pp.g2_powers.data(), z.c.size());
    G2 zq = multi_scalar_mul(bases, z.c);
    std::pair<G1Affine, G2Affine> pairs[2] = {
        {lhs.to_affine(), pp.g2_powers[0]},
        {G1::from_affine(w.point).negate().to_affine(), zq.to_affine()}};
    return pairing_product_is_one(pairs);
}

}  // namespace bmt
