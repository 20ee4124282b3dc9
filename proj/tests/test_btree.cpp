#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"

using namespace bmt;
using namespace bmt::testutil;

namespace {

struct PlainTree {
    MemNodeStore store;
    NodeId root;
    std::uint64_t count = 0;
    std::uint32_t q;

    explicit PlainTree(std::uint32_t q_) : q(q_) {
        root = store.alloc_id();
        store.put(root, TreeNode{});
    }

    std::size_t apply(bool is_insert, const Key& k, const Digest& d) {
        TreeTxn txn(store, q, root, count);
        if (is_insert) txn.insert(k, d, 0, 0);
        else txn.erase(k);
        std::size_t modified = txn.drafts().size();
        txn.commit();
        root = txn.root();
        count = txn.count();
        return modified;
    }

    StoreView view() const { return StoreView(store); }
};

}  // namespace

TEST_CASE("search on the empty tree returns the root path") {
    PlainTree t(4);
    SearchResult r = tree_search(t.view(), t.root, k64(10));
    CHECK(!r.found);
    CHECK(!r.elem.has_value());
    REQUIRE(r.path.size() == 1);
    CHECK(r.path[0].id == t.root);
}

TEST_CASE("read your write") {
    PlainTree t(4);
    t.apply(true, k64(42), dig(1));
    SearchResult r = tree_search(t.view(), t.root, k64(42));
    CHECK(r.found);
    CHECK(r.elem->vdigest == dig(1));
    CHECK(r.path.back().id != 0);
}

TEST_CASE("insert of an existing key updates the value in place") {
    PlainTree t(4);
    t.apply(true, k64(1), dig(1));
    t.apply(true, k64(1), dig(2));
    CHECK(t.count == 1);
    SearchResult r = tree_search(t.view(), t.root, k64(1));
    CHECK(r.elem->vdigest == dig(2));
}

TEST_CASE("q=4: fourth insert splits the leaf") {
    PlainTree t(4);
    for (std::uint64_t v : {1, 2, 3}) t.apply(true, k64(v), dig(v));
    CHECK(t.view().node(t.root)->leaf);
    t.apply(true, k64(4), dig(4));
    auto root = t.view().node(t.root);
    CHECK(!root->leaf);
    // one (key, child) element per child: two leaves of two elements each
    REQUIRE(root->inner.size() == 2);
    CHECK(t.view().node(root->inner[0].child)->elems.size() == 2);
    CHECK(t.view().node(root->inner[1].child)->elems.size() == 2);
    CHECK(root->inner[0].key == k64(2));
    CHECK(root->inner[1].key == k64(4));
    tree_check_invariants(t.view(), t.root, 4, 4);
}

TEST_CASE("sequential inserts keep invariants and order (q=4, 1..64 shuffled)") {
    std::mt19937_64 rng(21);
    std::vector<std::uint64_t> vals(64);
    for (std::uint64_t i = 0; i < 64; ++i) vals[i] = i + 1;
    std::shuffle(vals.begin(), vals.end(), rng);
    PlainTree t(4);
    for (auto v : vals) {
        t.apply(true, k64(v), dig(v));
        tree_check_invariants(t.view(), t.root, 4, t.count);
    }
    auto all = tree_range_scan(t.view(), t.root, k64(0), k64(100));
    REQUIRE(all.size() == 64);
    for (std::uint64_t i = 0; i < 64; ++i) CHECK(all[i].key == k64(i + 1));
}

TEST_CASE("delete the only key leaves an empty root") {
    PlainTree t(4);
    t.apply(true, k64(5), dig(5));
    t.apply(false, k64(5), {});
    CHECK(t.count == 0);
    auto root = t.view().node(t.root);
    CHECK(root->leaf);
    CHECK(root->elems.empty());
}

TEST_CASE("deleting an absent key is a no-op with no modified nodes") {
    PlainTree t(4);
    for (std::uint64_t v : {1, 2, 3}) t.apply(true, k64(v), dig(v));
    NodeId before = t.root;
    std::size_t modified = t.apply(false, k64(9), {});
    CHECK(modified == 0);
    CHECK(t.root == before);
    CHECK(t.count == 3);
}

TEST_CASE("insert 1..64 then delete 32 random keys") {
    std::mt19937_64 rng(22);
    PlainTree t(4);
    Oracle oracle;
    for (std::uint64_t v = 1; v <= 64; ++v) {
        t.apply(true, k64(v), dig(v));
        oracle[k64(v)] = dig(v);
    }
    std::vector<std::uint64_t> vals(64);
    for (std::uint64_t i = 0; i < 64; ++i) vals[i] = i + 1;
    std::shuffle(vals.begin(), vals.end(), rng);
    for (int i = 0; i < 32; ++i) {
        t.apply(false, k64(vals[i]), {});
        oracle.erase(k64(vals[i]));
        tree_check_invariants(t.view(), t.root, 4, t.count);
    }
    auto all = tree_range_scan(t.view(), t.root, k64(0), k64(100));
    REQUIRE(all.size() == oracle.size());
    auto it = oracle.begin();
    for (auto& e : all) CHECK(e.key == (it++)->first);
}

TEST_CASE("randomized oracle agreement, q in {4, 8, 16}") {
    for (std::uint32_t q : {4u, 8u, 16u}) {
        std::mt19937_64 rng(100 + q);
        PlainTree t(q);
        Oracle oracle;
        for (int step = 0; step < 2000; ++step) {
            std::uint64_t v = rng() % 300;
            if (rng() % 3 != 2) {
                t.apply(true, k64(v), dig(v + step));
                oracle[k64(v)] = dig(v + step);
            } else {
                t.apply(false, k64(v), {});
                oracle.erase(k64(v));
            }
            if (step % 97 == 0) {
                tree_check_invariants(t.view(), t.root, q, t.count);
                CHECK(t.count == oracle.size());
            }
        }
        tree_check_invariants(t.view(), t.root, q, t.count);
        // lookups agree
        for (std::uint64_t v = 0; v < 300; ++v) {
            SearchResult r = tree_search(t.view(), t.root, k64(v));
            auto it = oracle.find(k64(v));
            CHECK(r.found == (it != oracle.end()));
            if (r.found) CHECK(r.elem->vdigest == it->second);
        }
        // random ranges agree with the filtered oracle
        for (int trial = 0; trial < 50; ++trial) {
            std::uint64_t a = rng() % 320, b = rng() % 320;
            if (b < a) std::swap(a, b);
            auto got = tree_range_scan(t.view(), t.root, k64(a), k64(b));
            std::size_t want = 0;
            for (auto& [k, d] : oracle)
                if (k64(a) <= k && k <= k64(b)) ++want;
            CHECK(got.size() == want);
        }
    }
}

TEST_CASE("range scan edge cases") {
    PlainTree t(4);
    CHECK(tree_range_scan(t.view(), t.root, k64(1), k64(9)).empty());
    for (std::uint64_t v : {2, 4, 6}) t.apply(true, k64(v), dig(v));
    auto single = tree_range_scan(t.view(), t.root, k64(4), k64(4));
    REQUIRE(single.size() == 1);
    CHECK(single[0].key == k64(4));
    CHECK_THROWS_AS(tree_range_scan(t.view(), t.root, k64(5), k64(4)), std::invalid_argument);
}

TEST_CASE("height stays within the logarithmic bound") {
    for (std::uint32_t q : {4u, 8u}) {
        PlainTree t(q);
        std::mt19937_64 rng(23);
        for (std::uint64_t v = 0; v < 500; ++v) t.apply(true, k64(rng()), dig(v));
        double n = (double)t.count;
        std::size_t h = tree_height(t.view(), t.root);
        CHECK((double)h <= std::ceil(std::log(n) / std::log((double)q / 2)) + 1);
    }
}

TEST_CASE("oversized keys are rejected") {
    PlainTree t(4);
    Key big(kMaxKeyLen + 1, 0xaa);
    TreeTxn txn(t.store, 4, t.root, 0);
    CHECK_THROWS_AS(txn.insert(big, dig(0), 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(tree_search(t.view(), t.root, big), std::invalid_argument);
}

TEST_CASE("odd or tiny branching factors are rejected") {
    MemNodeStore s;
    CHECK_THROWS_AS(TreeTxn(s, 2, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(TreeTxn(s, 5, 1, 0), std::invalid_argument);
}

TEST_CASE("bulk load produces valid trees with the requested shape") {
    MemNodeStore s;
    std::vector<LeafElem> elems;
    for (std::uint64_t v = 1; v <= 18; ++v) elems.push_back({k64(v), dig(v), 0, 0});
    auto [root, count] = tree_bulk_load(s, 4, elems, 3, 2);
    StoreView view(s);
    tree_check_invariants(view, root, 4, count);
    CHECK(tree_height(view, root) == 2);
    auto rn = view.node(root);
    REQUIRE(rn->inner.size() == 3);
    for (auto& e : rn->inner) CHECK(view.node(e.child)->inner.size() == 2);

    // awkward remainders still satisfy occupancy
    for (std::size_t n : {1, 2, 3, 5, 7, 9, 23, 100}) {
        MemNodeStore s2;
        std::vector<LeafElem> es;
        for (std::uint64_t v = 0; v < n; ++v) es.push_back({k64(v), dig(v), 0, 0});
        auto [r2, c2] = tree_bulk_load(s2, 4, es, 3, 3);
        tree_check_invariants(StoreView(s2), r2, 4, c2);
    }
    // unsorted input rejected
    MemNodeStore s3;
    std::vector<LeafElem> bad = {{k64(2), dig(2), 0, 0}, {k64(1), dig(1), 0, 0}};
    CHECK_THROWS_AS(tree_bulk_load(s3, 4, bad, 2, 2), std::invalid_argument);
}
