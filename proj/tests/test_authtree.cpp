#include <doctest.h>

#include "test_util.hpp"

using namespace bmt;
using namespace bmt::testutil;

TEST_CASE("value scalars map digests into the field") {
    Digest a = dig(1), b = dig(2);
    CHECK(value_scalar(a) == hash_to_scalar(a));
    CHECK(value_scalar(b) == hash_to_scalar(b));
    CHECK(value_scalar(a) != value_scalar(b));
}

TEST_CASE("salted keys depend on key and 1-based position") {
    Key k = k64(7);
    CHECK(salted_key(k, 1) != salted_key(k, 2));
    CHECK(salted_key(k64(7), 1) == salted_key(k64(7), 1));
    CHECK(salted_key(k64(7), 1) != salted_key(k64(8), 1));
    CHECK_THROWS_AS(salted_key(k, 0), std::invalid_argument);
}

TEST_CASE("genesis and root record serialization") {
    RootRecord g = genesis_record();
    CHECK(g.root_hash == empty_root_hash());
    CHECK(g.element_count == 0);
    auto ser = g.serialize();
    CHECK(ser.size() == 120);
    RootRecord back = RootRecord::deserialize(ser);
    CHECK(back == g);
    CHECK_THROWS(RootRecord::deserialize(std::span<const std::uint8_t>(ser.data(), 119)));
}

TEST_CASE("single-element leaf commits to a constant polynomial") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::vector<UpdateOp> one = {UpdateOp::insert(k64(7), dig(7))};
    t.apply_updates(one);
    auto root = t.node(t.root_id());
    Fr vs = value_scalar(dig(7));
    CHECK(deserialize_g1(root->commitment) ==
          G1::from_affine(pp.g1_powers[0]).mul(vs).to_affine());
    CHECK(root->node_hash == compute_node_hash(root->commitment, NodeType::root, 1));
}

TEST_CASE("identical contents recommit to identical hashes") {
    const PublicParams& pp = shared_params();
    std::vector<std::uint64_t> order1 = {5, 1, 9, 3, 7};
    std::vector<std::uint64_t> order2 = {9, 3, 7, 5, 1};
    MemNodeStore s1, s2;
    AuthTree t1(s1, pp, 8), t2(s2, pp, 8);
    for (auto v : order1) {
        std::vector<UpdateOp> op = {UpdateOp::insert(k64(v), dig(v))};
        t1.apply_updates(op);
    }
    for (auto v : order2) {
        std::vector<UpdateOp> op = {UpdateOp::insert(k64(v), dig(v))};
        t2.apply_updates(op);
    }
    // same sorted content -> same commitment, because salting follows sorted position
    CHECK(t1.record().root_hash == t2.record().root_hash);
}

TEST_CASE("apply_updates semantics") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);

    // empty batch: no record published
    auto r0 = t.apply_updates({});
    CHECK(!r0.published);
    CHECK(t.record().root_hash == empty_root_hash());

    // deleting an absent key publishes nothing either
    std::vector<UpdateOp> nop = {UpdateOp::remove(k64(99))};
    auto rn = t.apply_updates(nop);
    CHECK(!rn.published);

    // a batch equals the same ops applied one at a time
    std::vector<UpdateOp> batch;
    for (std::uint64_t v = 0; v < 30; ++v) batch.push_back(UpdateOp::insert(k64(v), dig(v)));
    auto r1 = t.apply_updates(batch);
    CHECK(r1.published);
    CHECK(r1.record.element_count == 30);
    CHECK(r1.record.previous == empty_root_hash());

    MemNodeStore s2;
    AuthTree t2(s2, pp, 8);
    for (auto& op : batch) {
        std::span<const UpdateOp> one(&op, 1);
        t2.apply_updates(one);
    }
    CHECK(t2.record().root_hash == r1.record.root_hash);

    // any single insert changes the root hash
    Digest before = t.record().root_hash;
    std::vector<UpdateOp> one = {UpdateOp::insert(k64(500), dig(500))};
    t.apply_updates(one);
    CHECK(t.record().root_hash != before);
    CHECK(t.record().previous == before);
}

TEST_CASE("root determinism under replay") {
    const PublicParams& pp = shared_params();
    std::mt19937_64 script_rng(31);
    std::vector<UpdateOp> script;
    for (int i = 0; i < 120; ++i) {
        std::uint64_t v = script_rng() % 60;
        if (script_rng() % 3 == 2) script.push_back(UpdateOp::remove(k64(v)));
        else script.push_back(UpdateOp::insert(k64(v), dig(v + i)));
    }
    MemNodeStore s1, s2;
    AuthTree t1(s1, pp, 8), t2(s2, pp, 8);
    for (auto& op : script) {
        std::span<const UpdateOp> one(&op, 1);
        auto a = t1.apply_updates(one);
        auto b = t2.apply_updates(one);
        CHECK(a.record.root_hash == b.record.root_hash);
    }
}

TEST_CASE("any value digest change reaches the root") {
    const PublicParams& pp = shared_params();
    std::mt19937_64 rng(32);
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::vector<UpdateOp> batch;
    for (std::uint64_t v = 0; v < 100; ++v) batch.push_back(UpdateOp::insert(k64(v), dig(v)));
    t.apply_updates(batch);

    for (int trial = 0; trial < 50; ++trial) {
        std::uint64_t v = rng() % 100;
        Digest d = dig(v);
        d[rng() % 32] ^= (std::uint8_t)(1u << (rng() % 8));
        Digest before = t.record().root_hash;
        std::vector<UpdateOp> upd = {UpdateOp::insert(k64(v), d)};
        t.apply_updates(upd);
        CHECK(t.record().root_hash != before);
        std::vector<UpdateOp> back = {UpdateOp::insert(k64(v), dig(v))};
        t.apply_updates(back);
    }
}

TEST_CASE("modified set per single insert stays near the path") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::mt19937_64 rng(33);
    std::vector<UpdateOp> warm;
    for (std::uint64_t v = 0; v < 300; ++v) warm.push_back(UpdateOp::insert(k64(v * 2), dig(v)));
    t.apply_updates(warm);
    for (int i = 0; i < 40; ++i) {
        std::uint64_t v = rng() % 700;
        std::size_t height = t.height();
        std::vector<UpdateOp> one = {UpdateOp::insert(k64(v), dig(v))};
        auto res = t.apply_updates(one);
        if (!res.published) continue;
        // path nodes plus at most one split partner per level plus a new root
        CHECK(res.modified.size() <= 2 * (height + 1) + 1);
    }
}

TEST_CASE("every committed node verifies against its cached polynomial") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::vector<UpdateOp> batch;
    for (std::uint64_t v = 0; v < 120; ++v) batch.push_back(UpdateOp::insert(k64(v), dig(v)));
    t.apply_updates(batch);

    std::vector<NodeId> stack = {t.root_id()};
    std::size_t seen = 0;
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        auto n = t.node(id);
        ++seen;
        Commitment c{deserialize_g1(n->commitment)};
        CHECK(verify_poly(pp, c, t.node_poly(id)));
        NodeType ty = t.type_of(id, *n);
        CHECK(n->node_hash == compute_node_hash(n->commitment, ty, n->count()));
        if (!n->leaf)
            for (auto& e : n->inner) stack.push_back(e.child);
    }
    CHECK(seen > 10);
}

TEST_CASE("branching factor must fit the degree bound") {
    const PublicParams& pp = shared_params(8);
    MemNodeStore s;
    CHECK_THROWS_AS(AuthTree(s, pp, 16), std::invalid_argument);
}

TEST_CASE("delete back to the empty tree restores the genesis hash") {
    const PublicParams& pp = shared_params();
    MemNodeStore s;
    AuthTree t(s, pp, 8);
    std::vector<UpdateOp> ins = {UpdateOp::insert(k64(1), dig(1)),
                                 UpdateOp::insert(k64(2), dig(2))};
    t.apply_updates(ins);
    std::vector<UpdateOp> del = {UpdateOp::remove(k64(1)), UpdateOp::remove(k64(2))};
    t.apply_updates(del);
    CHECK(t.record().element_count == 0);
    CHECK(t.record().root_hash == empty_root_hash());
}
