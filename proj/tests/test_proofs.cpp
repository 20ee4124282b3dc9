#include <doctest.h>

#include <memory>
#include <set>

#include "bmt/proofs.hpp"
#include "test_util.hpp"

using namespace bmt;
using namespace bmt::testutil;

namespace {

// evens 2..2n so every odd key is an interior gap
std::unique_ptr<AuthTree> even_tree(MemNodeStore& store, const PublicParams& pp, std::uint32_t q,
                                    std::uint64_t n) {
    auto t = std::make_unique<AuthTree>(store, pp, q);
    std::vector<UpdateOp> batch;
    for (std::uint64_t v = 1; v <= n; ++v) batch.push_back(UpdateOp::insert(k64(2 * v), dig(2 * v)));
    t->apply_updates(batch);
    return t;
}

// independent accounting oracle: interior size plus one bit per node whose
// subtree lies wholly inside [lo, hi] and that sits on no boundary path
std::size_t oracle_bits(const AuthTree& t, const Key& lo, const Key& hi) {
    if (t.record().element_count == 0) return 0;
    auto scan = t.range_scan(lo, hi);
    if (scan.empty()) return 0;
    std::set<NodeId> on_path;
    for (const auto& st : t.search(scan.front().key).path) on_path.insert(st.id);
    for (const auto& st : t.search(scan.back().key).path) on_path.insert(st.id);
    std::size_t total = scan.size();
    auto walk = [&](auto&& self, NodeId id) -> std::pair<Key, Key> {
        auto n = t.node(id);
        if (n->leaf) return {n->elems.front().key, n->elems.back().key};
        Key mn, mx;
        for (std::size_t i = 0; i < n->inner.size(); ++i) {
            auto [cmn, cmx] = self(self, n->inner[i].child);
            NodeId cid = n->inner[i].child;
            if (!on_path.count(cid) && !(cmn < lo) && !(hi < cmx)) ++total;
            if (i == 0) mn = cmn;
            mx = cmx;
        }
        return {mn, mx};
    };
    walk(walk, t.root_id());
    return total;
}

}  // namespace

TEST_CASE("membership: single-leaf tree proves at index 1") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::vector<UpdateOp> one = {UpdateOp::insert(k64(5), dig(5))};
    t.apply_updates(one);
    MembershipProof p = prove_membership(t, k64(5));
    REQUIRE(p.levels.size() == 1);
    CHECK(p.levels[0].opened[0].index1 == 1);
    CHECK(p.levels[0].type == 0);  // the root doubles as the leaf
    CHECK(verify_membership(pp, t.record(), k64(5), dig(5), p));
}

TEST_CASE("membership: level count follows the tree height") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 4, 64);
    MembershipProof p = prove_membership(*t, k64(64));
    CHECK(p.levels.size() == t->height() + 1);
    CHECK(verify_membership(pp, t->record(), k64(64), dig(64), p));
    CHECK_THROWS_AS(prove_membership(*t, k64(63)), std::invalid_argument);
}

TEST_CASE("membership level payload is independent of the branching factor") {
    std::vector<std::size_t> per_level;
    for (std::uint32_t q : {16u, 256u}) {
        PublicParams pp = setup_test(q, 9);
        MemNodeStore s;
        auto t = even_tree(s, pp, q, 300);
        MembershipProof p = prove_membership(*t, k64(300));
        Bytes blob = serialize_proof(p);
        // strip the fixed header (version, type, level count) and the
        // per-level record count bytes
        std::size_t body = blob.size() - 4 - p.levels.size();
        CHECK(body % p.levels.size() == 0);
        per_level.push_back(body / p.levels.size());
        CHECK(verify_membership(pp, t->record(), k64(300), dig(300), p));
    }
    CHECK(per_level[0] == per_level[1]);
}

TEST_CASE("non-membership: both cases, boundaries, and the empty tree") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 4, 150);
    const RootRecord rec = t->record();

    int case1 = 0, case2 = 0;
    for (std::uint64_t v = 3; v < 300; v += 2) {
        NonMembershipProof p = prove_nonmembership(*t, k64(v));
        CHECK(verify_nonmembership(pp, rec, k64(v), p));
        if (p.kind == BoundKind::case1) {
            ++case1;
            const auto& leaf = p.levels.back()[0];
            REQUIRE(leaf.opened.size() == 2);
            CHECK(leaf.opened[0].index1 + 1 == leaf.opened[1].index1);
            for (std::size_t i = 0; i + 1 < p.levels.size(); ++i)
                CHECK(p.levels[i][0].opened.size() == 1);
        }
        if (p.kind == BoundKind::case2) {
            ++case2;
            CHECK(p.levels.back().size() == 2);
            CHECK(p.levels[p.interval_level][0].opened.size() == 2);
        }
    }
    CHECK(case1 > 0);
    CHECK(case2 > 0);

    NonMembershipProof low = prove_nonmembership(*t, k64(1));
    CHECK(low.kind == BoundKind::low);
    CHECK(verify_nonmembership(pp, rec, k64(1), low));
    // a proof for one key does not transfer outside its gap
    CHECK(!verify_nonmembership(pp, rec, k64(2), low));

    NonMembershipProof high = prove_nonmembership(*t, k64(999));
    CHECK(high.kind == BoundKind::high);
    CHECK(verify_nonmembership(pp, rec, k64(999), high));

    MemNodeStore s2;
    AuthTree empty(s2, pp, 4);
    NonMembershipProof e = prove_nonmembership(empty, k64(1));
    CHECK(e.kind == BoundKind::empty_tree);
    CHECK(verify_nonmembership(pp, empty.record(), k64(1), e));
    CHECK(!verify_nonmembership(pp, rec, k64(1), e));

    CHECK_THROWS_AS(prove_nonmembership(*t, k64(100)), std::invalid_argument);
}

TEST_CASE("non-membership proofs hold across their whole gap only") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 50);
    const RootRecord rec = t->record();
    // gap between 40 and 42: any key inside verifies, outside fails
    NonMembershipProof p = prove_nonmembership(*t, k64(41));
    CHECK(verify_nonmembership(pp, rec, k64(41), p));
    Key inside = k64(40);
    inside.push_back(0x01);  // 40 || 0x01 lies strictly between 40 and 42
    CHECK(verify_nonmembership(pp, rec, inside, p));
    CHECK(!verify_nonmembership(pp, rec, k64(43), p));
    CHECK(!verify_nonmembership(pp, rec, k64(40), p));
}

TEST_CASE("non-membership: forged non-adjacent openings are rejected") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 60);
    for (std::uint64_t v = 3; v < 120; v += 2) {
        NonMembershipProof p = prove_nonmembership(*t, k64(v));
        if (p.kind != BoundKind::case1) continue;
        NodeId leaf_id = t->search(k64(v)).path.back().id;
        auto leaf_node = t->node(leaf_id);
        std::size_t i0 = p.levels.back()[0].opened[0].index1 - 1;
        if (i0 + 2 >= leaf_node->elems.size()) continue;
        // widen the bracket: claim (i, i+2) openings built from two singles,
        // with an honestly recomputed batch witness for those two points
        NonMembershipProof forged = p;
        auto& leaf = forged.levels.back()[0];
        leaf.opened[1].key = leaf_node->elems[i0 + 2].key;
        leaf.opened[1].index1 = (std::uint32_t)(i0 + 3);
        leaf.opened[1].digest = leaf_node->elems[i0 + 2].vdigest;
        const Poly& poly = t->node_poly(leaf_id);
        std::vector<Fr> salts = {salted_key(leaf.opened[0].key, leaf.opened[0].index1),
                                 salted_key(leaf.opened[1].key, leaf.opened[1].index1)};
        leaf.witness = create_batch_witness(pp, poly, salts).serialize();
        // the forged claim covers keys the wider interval would admit
        Key mid = leaf_node->elems[i0 + 1].key;
        mid.push_back(0x01);
        CHECK(!verify_nonmembership(pp, t->record(), k64(v), forged));
        CHECK(!verify_nonmembership(pp, t->record(), mid, forged));
        return;
    }
    FAIL("no suitable case-1 gap found");
}

TEST_CASE("proofs are bound to their root version") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 40);
    const RootRecord old_rec = t->record();
    NonMembershipProof gap = prove_nonmembership(*t, k64(41));
    CHECK(verify_nonmembership(pp, old_rec, k64(41), gap));
    // inserting the key changes the root; the old proof fails on the new root
    std::vector<UpdateOp> ins = {UpdateOp::insert(k64(41), dig(41))};
    t->apply_updates(ins);
    CHECK(t->record().root_hash != old_rec.root_hash);
    CHECK(!verify_nonmembership(pp, t->record(), k64(41), gap));
    CHECK(verify_nonmembership(pp, old_rec, k64(41), gap));
}

TEST_CASE("range: single element and degenerate shapes") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 100);
    const RootRecord rec = t->record();

    RangeProof one = prove_range(*t, k64(100), k64(100));
    auto r1 = verify_range(pp, rec, k64(100), k64(100), one);
    CHECK(r1.ok);
    REQUIRE(r1.interior.size() == 1);
    CHECK(r1.interior[0].first == k64(100));
    // degenerate bit vectors: a single run
    std::size_t set_bits = 0;
    for (const auto& v : one.bit_vectors)
        for (bool b : v) set_bits += b;
    CHECK(set_bits == 1);

    // an empty range degenerates to a non-membership proof for the gap
    RangeProof gap = prove_range(*t, k64(101), k64(101));
    CHECK(gap.right_kind == kEmptyRange);
    CHECK(gap.interior.empty());
    auto r2 = verify_range(pp, rec, k64(101), k64(101), gap);
    CHECK(r2.ok);
    // the embedded structure serializes exactly like the non-membership proof
    // modulo the type/kind header
    NonMembershipProof nm = prove_nonmembership(*t, k64(101));
    Bytes nm_blob = serialize_proof(nm);
    Bytes gap_blob = serialize_proof(gap);
    CHECK(gap_blob.size() == nm_blob.size() + 7);  // extra kind byte + empty vec/interior counts

    // the same gap proof does not cover a range containing real elements
    CHECK(!verify_range(pp, rec, k64(101), k64(103), gap).ok);

    // empty tree
    MemNodeStore s2;
    AuthTree empty(s2, pp, 8);
    RangeProof re = prove_range(empty, k64(1), k64(50));
    CHECK(verify_range(pp, empty.record(), k64(1), k64(50), re).ok);

    CHECK_THROWS_AS(prove_range(*t, k64(5), k64(4)), std::invalid_argument);
}

TEST_CASE("range: canonical bit-vector accounting fixture (q=4, h=2, m=16)") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    std::vector<LeafElem> elems;
    for (std::uint64_t v = 1; v <= 18; ++v) elems.push_back({k64(v), dig(v), 0, 0});
    auto [root_id, count] = tree_bulk_load(s, 4, elems, 3, 2);
    RootRecord rec = authenticate_tree(s, pp, root_id, count);
    AuthTree t(s, pp, 4, rec, root_id);
    REQUIRE(t.height() == 2);
    REQUIRE(t.node(root_id)->inner.size() == 3);

    RangeProof p = prove_range(t, k64(2), k64(17));
    auto r = verify_range(pp, rec, k64(2), k64(17), p);
    CHECK(r.ok);
    REQUIRE(r.interior.size() == 16);
    // sum_{j=0}^{2} 16/4^j = 16 + 4 + 1
    REQUIRE(p.bit_vectors.size() == 3);
    CHECK(p.bit_vectors[2].size() == 16);
    CHECK(p.bit_vectors[1].size() == 4);
    CHECK(p.bit_vectors[0].size() == 1);
    CHECK(range_bit_count(p) == 21);
    CHECK(oracle_bits(t, k64(2), k64(17)) == 21);
}

TEST_CASE("range: bit accounting matches the oracle on random trees") {
    const PublicParams& pp = shared_params();
    std::mt19937_64 rng(41);
    for (std::uint32_t q : {4u, 8u}) {
        MemNodeStore s;
        auto t = even_tree(s, pp, q, 200);
        for (int trial = 0; trial < 25; ++trial) {
            std::uint64_t a = rng() % 420, b = rng() % 420;
            if (b < a) std::swap(a, b);
            RangeProof p = prove_range(*t, k64(a), k64(b));
            if (p.right_kind == kEmptyRange) continue;
            CHECK(range_bit_count(p) == oracle_bits(*t, k64(a), k64(b)));
        }
    }
}

TEST_CASE("range: interior equals the brute-force filter") {
    const PublicParams& pp = shared_params();
    std::mt19937_64 rng(42);
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 250);
    const RootRecord rec = t->record();
    for (int trial = 0; trial < 30; ++trial) {
        std::uint64_t a = rng() % 520, b = rng() % 520;
        if (b < a) std::swap(a, b);
        RangeProof p = prove_range(*t, k64(a), k64(b));
        auto r = verify_range(pp, rec, k64(a), k64(b), p);
        CHECK(r.ok);
        auto oracle = t->range_scan(k64(a), k64(b));
        REQUIRE(r.interior.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(r.interior[i].first == oracle[i].key);
            CHECK(r.interior[i].second == oracle[i].vdigest);
        }
    }
}

TEST_CASE("range: omissions and reorderings are rejected") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 120);
    const RootRecord rec = t->record();
    const Key lo = k64(30), hi = k64(130);

    RangeProof honest = prove_range(*t, lo, hi);
    REQUIRE(verify_range(pp, rec, lo, hi, honest).ok);

    {
        RangeProof bad = honest;
        std::size_t victim = bad.interior.size() / 2;
        bad.interior.erase(bad.interior.begin() + (std::ptrdiff_t)victim);
        bad.bit_vectors.back().pop_back();
        CHECK(!verify_range(pp, rec, lo, hi, bad).ok);
    }
    {
        RangeProof bad = honest;
        std::swap(bad.interior[4], bad.interior[5]);
        CHECK(!verify_range(pp, rec, lo, hi, bad).ok);
    }
    {
        // swapping two digests keeps keys sorted but must still fail
        RangeProof bad = honest;
        std::swap(bad.interior[4].second, bad.interior[5].second);
        CHECK(!verify_range(pp, rec, lo, hi, bad).ok);
    }
}

TEST_CASE("tamper battery across all proof types") {
    const PublicParams& pp = shared_params();
    std::mt19937_64 rng(43);
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 90);
    const RootRecord rec = t->record();

    auto flip = [&](Bytes& b) {
        std::size_t at = 2 + rng() % (b.size() - 2);  // keep the header parseable
        b[at] ^= (std::uint8_t)(1u << (rng() % 8));
        return at;
    };

    int rejected = 0, attempts = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::uint64_t v = 2 * (1 + rng() % 90);
        MembershipProof mp = prove_membership(*t, k64(v));
        Bytes blob = serialize_proof(mp);
        flip(blob);
        ++attempts;
        try {
            MembershipProof parsed = parse_membership(blob);
            if (!verify_membership(pp, rec, k64(v), dig(v), parsed)) ++rejected;
        } catch (...) {
            ++rejected;
        }
    }
    for (int trial = 0; trial < 40; ++trial) {
        std::uint64_t v = 2 * (rng() % 91) + 1;
        NonMembershipProof np = prove_nonmembership(*t, k64(v));
        Bytes blob = serialize_proof(np);
        flip(blob);
        ++attempts;
        try {
            NonMembershipProof parsed = parse_nonmembership(blob);
            if (!verify_nonmembership(pp, rec, k64(v), parsed)) ++rejected;
        } catch (...) {
            ++rejected;
        }
    }
    for (int trial = 0; trial < 20; ++trial) {
        std::uint64_t a = rng() % 200, b = a + rng() % 60;
        RangeProof rp = prove_range(*t, k64(a), k64(b));
        Bytes blob = serialize_proof(rp);
        flip(blob);
        ++attempts;
        try {
            RangeProof parsed = parse_range(blob);
            if (!verify_range(pp, rec, k64(a), k64(b), parsed).ok) ++rejected;
        } catch (...) {
            ++rejected;
        }
    }
    CHECK(rejected == attempts);
}

TEST_CASE("proof sizes: non-membership case 1 adds exactly one opened record") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    auto t = even_tree(s, pp, 8, 90);
    // pick a case-1 gap whose leaf path matches a membership proof of its
    // predecessor (same level count)
    for (std::uint64_t v = 31; v < 160; v += 2) {
        NonMembershipProof np = prove_nonmembership(*t, k64(v));
        if (np.kind != BoundKind::case1) continue;
        MembershipProof mp = prove_membership(*t, k64(v - 1));
        std::size_t nm_size = proof_size(np);
        std::size_t mem_size = proof_size(mp);
        // one extra opened element (key len prefix + 8-byte key + index +
        // digest) plus the kind byte and interval level field
        std::size_t opened_bytes = 2 + 8 + 2 + 32;
        CHECK(nm_size == mem_size + opened_bytes + 3);
        return;
    }
    FAIL("no case-1 gap found");
}

TEST_CASE("completeness sweep over random trees") {
    std::mt19937_64 rng(44);
    for (std::uint32_t q : {4u, 8u, 16u}) {
        const PublicParams& pp = shared_params(16);
        MemNodeStore s;
        AuthTree t(s, pp, q);
        std::vector<UpdateOp> batch;
        std::set<std::uint64_t> present;
        for (int i = 0; i < 400; ++i) {
            std::uint64_t v = rng() % 5000;
            present.insert(v * 2);
            batch.push_back(UpdateOp::insert(k64(v * 2), dig(v * 2)));
        }
        t.apply_updates(batch);
        const RootRecord rec = t.record();
        int n = 0;
        for (std::uint64_t v : present) {
            if (++n > 25) break;
            MembershipProof p = prove_membership(t, k64(v));
            CHECK(verify_membership(pp, rec, k64(v), dig(v), p));
            NonMembershipProof np = prove_nonmembership(t, k64(v + 1));
            CHECK(verify_nonmembership(pp, rec, k64(v + 1), np));
        }
        for (int trial = 0; trial < 10; ++trial) {
            std::uint64_t a = rng() % 10000, b = a + rng() % 2000;
            RangeProof p = prove_range(t, k64(a), k64(b));
            CHECK(verify_range(pp, rec, k64(a), k64(b), p).ok);
        }
    }
}
