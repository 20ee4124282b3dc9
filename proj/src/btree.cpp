#include "bmt/btree.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmt {

namespace {

// First slot whose separator is >= key; falls through to the last child.
std::size_t descend_slot(const TreeNode& n, const Key& key) {
    std::size_t lo = 0, hi = n.count();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (n.key_at(mid) < key) lo = mid + 1;
        else hi = mid;
    }
    return lo < n.count() ? lo : n.count() - 1;
}

std::size_t leaf_lower_bound(const TreeNode& n, const Key& key) {
    std::size_t lo = 0, hi = n.elems.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (n.elems[mid].key < key) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

void check_key(const Key& key) {
    if (key.size() > kMaxKeyLen) throw std::invalid_argument("key exceeds maximum length");
}

}  // namespace

void validate_branching(std::uint32_t q) {
    if (q < 4 || q % 2 != 0)
        throw std::invalid_argument("branching factor must be even and >= 4");
}

SearchResult tree_search(const NodeView& view, NodeId root, const Key& key) {
    check_key(key);
    SearchResult r;
    NodeId cur = root;
    for (;;) {
        auto n = view.node(cur);
        if (n->leaf) {
            std::size_t pos = leaf_lower_bound(*n, key);
            r.path.push_back({cur, pos});
            if (pos < n->elems.size() && n->elems[pos].key == key) {
                r.found = true;
                r.elem = n->elems[pos];
            }
            return r;
        }
        if (n->inner.empty()) throw std::logic_error("internal node with no children");
        std::size_t slot = descend_slot(*n, key);
        r.path.push_back({cur, slot});
        cur = n->inner[slot].child;
    }
}

namespace {

void range_rec(const NodeView& view, NodeId id, const Key& lo, const Key& hi,
               std::vector<LeafElem>& out) {
    auto n = view.node(id);
    if (n->leaf) {
        for (const auto& e : n->elems)
            if (!(e.key < lo) && !(hi < e.key)) out.push_back(e);
        return;
    }
    for (std::size_t i = 0; i < n->inner.size(); ++i) {
        if (n->inner[i].key < lo) continue;           // subtree max below range
        if (i > 0 && !(n->inner[i - 1].key < hi)) break;  // subtree min above range
        range_rec(view, n->inner[i].child, lo, hi, out);
    }
}

}  // namespace

std::vector<LeafElem> tree_range_scan(const NodeView& view, NodeId root, const Key& lo,
                                      const Key& hi) {
    check_key(lo);
    check_key(hi);
    if (hi < lo) throw std::invalid_argument("range scan: lo > hi");
    std::vector<LeafElem> out;
    range_rec(view, root, lo, hi, out);
    return out;
}

std::size_t tree_height(const NodeView& view, NodeId root) {
    std::size_t h = 0;
    NodeId cur = root;
    for (;;) {
        auto n = view.node(cur);
        if (n->leaf) return h;
        cur = n->inner[0].child;
        ++h;
    }
}

namespace {

struct CheckOut {
    std::size_t depth;
    Key min, max;
    std::uint64_t count;
};

CheckOut check_rec(const NodeView& view, NodeId id, std::uint32_t q, bool is_root) {
    auto n = view.node(id);
    std::size_t cnt = n->count();
    std::size_t min_occ = q / 2;
    if (is_root) {
        if (!n->leaf && cnt < 2) throw std::logic_error("invariant: internal root below 2 elements");
    } else {
        if (cnt < min_occ) throw std::logic_error("invariant: node below minimum occupancy");
    }
    if (cnt > (std::size_t)q - 1) throw std::logic_error("invariant: node above maximum occupancy");
    for (std::size_t i = 1; i < cnt; ++i)
        if (!(n->key_at(i - 1) < n->key_at(i)))
            throw std::logic_error("invariant: keys not strictly sorted");
    if (n->leaf) {
        if (cnt == 0) return {0, {}, {}, 0};
        return {0, n->elems.front().key, n->elems.back().key, cnt};
    }
    CheckOut agg{};
    std::uint64_t total = 0;
    std::size_t depth = 0;
    for (std::size_t i = 0; i < cnt; ++i) {
        CheckOut c = check_rec(view, n->inner[i].child, q, false);
        if (i == 0) {
            depth = c.depth;
            agg.min = c.min;
        } else {
            if (c.depth != depth) throw std::logic_error("invariant: leaves at unequal depth");
            if (!(n->inner[i - 1].key < c.min))
                throw std::logic_error("invariant: child range overlaps previous separator");
        }
        if (!(c.max == n->inner[i].key))
            throw std::logic_error("invariant: separator is not the child subtree max");
        total += c.count;
    }
    agg.depth = depth + 1;
    agg.max = n->inner.back().key;
    agg.count = total;
    return agg;
}

}  // namespace

void tree_check_invariants(const NodeView& view, NodeId root, std::uint32_t q,
                           std::uint64_t expect_count) {
    CheckOut c = check_rec(view, root, q, true);
    if (c.count != expect_count) throw std::logic_error("invariant: element count mismatch");
}

TreeTxn::TreeTxn(NodeStore& store, std::uint32_t q, NodeId root, std::uint64_t count)
    : store_(store), q_(q), root_(root), count_(count) {
    validate_branching(q);
}

std::shared_ptr<const TreeNode> TreeTxn::node(NodeId id) const {
    auto it = drafts_.find(id);
    if (it != drafts_.end()) return std::shared_ptr<const TreeNode>(&it->second, [](auto*) {});
    return store_.get(id);
}

TreeNode& TreeTxn::draft(NodeId id) {
    auto it = drafts_.find(id);
    if (it == drafts_.end()) throw std::logic_error("draft: node not drafted");
    return it->second;
}

std::pair<NodeId, TreeNode*> TreeTxn::draft_cow(NodeId id) {
    auto it = drafts_.find(id);
    if (it != drafts_.end()) return {id, &it->second};
    TreeNode copy = *store_.get(id);
    NodeId nid = store_.alloc_id();
    auto [pos, ok] = drafts_.emplace(nid, std::move(copy));
    (void)ok;
    return {nid, &pos->second};
}

TreeTxn::Split TreeTxn::insert_rec(NodeId& id, const Key& key, const Digest& vd,
                                   std::uint64_t voff, std::uint32_t vlen, bool& was_new) {
    auto [nid, np] = draft_cow(id);
    id = nid;
    TreeNode& n = *np;
    if (n.leaf) {
        std::size_t pos = leaf_lower_bound(n, key);
        if (pos < n.elems.size() && n.elems[pos].key == key) {
            n.elems[pos].vdigest = vd;
            n.elems[pos].voff = voff;
            n.elems[pos].vlen = vlen;
            was_new = false;
        } else {
            n.elems.insert(n.elems.begin() + (std::ptrdiff_t)pos, LeafElem{key, vd, voff, vlen});
            was_new = true;
        }
    } else {
        std::size_t slot = descend_slot(n, key);
        NodeId cid = n.inner[slot].child;
        Split s = insert_rec(cid, key, vd, voff, vlen, was_new);
        n.inner[slot].child = cid;
        n.inner[slot].key = node(cid)->max_key();
        if (s.happened) {
            Key rmax = node(s.right_id)->max_key();
            n.inner.insert(n.inner.begin() + (std::ptrdiff_t)slot + 1,
                           InnerElem{std::move(rmax), s.right_id});
        }
    }
    // split on overflow: q elements -> q/2 + q/2
    if (n.count() <= (std::size_t)q_ - 1) return {};
    TreeNode right;
    right.leaf = n.leaf;
    std::size_t keep = q_ / 2;
    if (n.leaf) {
        right.elems.assign(n.elems.begin() + (std::ptrdiff_t)keep, n.elems.end());
        n.elems.resize(keep);
    } else {
        right.inner.assign(n.inner.begin() + (std::ptrdiff_t)keep, n.inner.end());
        n.inner.resize(keep);
    }
    NodeId rid = store_.alloc_id();
    drafts_.emplace(rid, std::move(right));
    return {true, rid};
}

bool TreeTxn::insert(const Key& key, const Digest& vdigest, std::uint64_t voff,
                     std::uint32_t vlen) {
    check_key(key);
    bool was_new = false;
    NodeId rid = root_;
    Split s = insert_rec(rid, key, vdigest, voff, vlen, was_new);
    root_ = rid;
    if (s.happened) {
        TreeNode nr;
        nr.leaf = false;
        nr.inner.push_back({node(root_)->max_key(), root_});
        nr.inner.push_back({node(s.right_id)->max_key(), s.right_id});
        NodeId nrid = store_.alloc_id();
        drafts_.emplace(nrid, std::move(nr));
        root_ = nrid;
    }
    if (was_new) ++count_;
    return was_new;
}

void TreeTxn::rebalance_child(TreeNode& parent, std::size_t slot) {
    std::size_t min_occ = q_ / 2;
    NodeId cid = parent.inner[slot].child;
    TreeNode& child = draft(cid);

    auto sib = [&](std::size_t s) -> std::pair<NodeId, const TreeNode*> {
        NodeId id = parent.inner[s].child;
        return {id, node(id).get()};
    };

    if (slot > 0) {
        auto [lid, lview] = sib(slot - 1);
        if (lview->count() > min_occ) {
            auto [nlid, lp] = draft_cow(lid);
            parent.inner[slot - 1].child = nlid;
            TreeNode& left = *lp;
            if (child.leaf) {
                child.elems.insert(child.elems.begin(), std::move(left.elems.back()));
                left.elems.pop_back();
            } else {
                child.inner.insert(child.inner.begin(), std::move(left.inner.back()));
                left.inner.pop_back();
            }
            parent.inner[slot - 1].key = left.max_key();
            return;
        }
    }
    if (slot + 1 < parent.inner.size()) {
        auto [rid, rview] = sib(slot + 1);
        if (rview->count() > min_occ) {
            auto [nrid, rp] = draft_cow(rid);
            parent.inner[slot + 1].child = nrid;
            TreeNode& right = *rp;
            if (child.leaf) {
                child.elems.push_back(std::move(right.elems.front()));
                right.elems.erase(right.elems.begin());
            } else {
                child.inner.push_back(std::move(right.inner.front()));
                right.inner.erase(right.inner.begin());
            }
            parent.inner[slot].key = child.max_key();
            return;
        }
    }
    if (slot > 0) {
        // merge child into the left sibling
        auto [lid, lp] = draft_cow(parent.inner[slot - 1].child);
        parent.inner[slot - 1].child = lid;
        TreeNode& left = *lp;
        if (child.leaf)
            std::move(child.elems.begin(), child.elems.end(), std::back_inserter(left.elems));
        else
            std::move(child.inner.begin(), child.inner.end(), std::back_inserter(left.inner));
        parent.inner[slot - 1].key = left.max_key();
        parent.inner.erase(parent.inner.begin() + (std::ptrdiff_t)slot);
        drafts_.erase(cid);
        return;
    }
    // merge the right sibling into child
    auto [rid, rview] = sib(slot + 1);
    TreeNode right_copy = *rview;
    if (child.leaf)
        std::move(right_copy.elems.begin(), right_copy.elems.end(),
                  std::back_inserter(child.elems));
    else
        std::move(right_copy.inner.begin(), right_copy.inner.end(),
                  std::back_inserter(child.inner));
    parent.inner[slot].key = child.max_key();
    parent.inner.erase(parent.inner.begin() + (std::ptrdiff_t)slot + 1);
    drafts_.erase(rid);
}

void TreeTxn::erase_rec(NodeId& id, const Key& key) {
    auto [nid, np] = draft_cow(id);
    id = nid;
    TreeNode& n = *np;
    if (n.leaf) {
        std::size_t pos = leaf_lower_bound(n, key);
        if (pos >= n.elems.size() || !(n.elems[pos].key == key))
            throw std::logic_error("erase_rec: key vanished");
        n.elems.erase(n.elems.begin() + (std::ptrdiff_t)pos);
        return;
    }
    std::size_t slot = descend_slot(n, key);
    NodeId cid = n.inner[slot].child;
    erase_rec(cid, key);
    n.inner[slot].child = cid;
    if (node(cid)->count() > 0) n.inner[slot].key = node(cid)->max_key();
    if (node(cid)->count() < (std::size_t)q_ / 2) rebalance_child(n, slot);
}

bool TreeTxn::erase(const Key& key) {
    check_key(key);
    if (!tree_search(*this, root_, key).found) return false;
    NodeId rid = root_;
    erase_rec(rid, key);
    root_ = rid;
    auto r = node(root_);
    if (!r->leaf && r->inner.size() == 1) {
        NodeId only = r->inner[0].child;
        drafts_.erase(root_);
        root_ = only;
    }
    --count_;
    return true;
}

void TreeTxn::commit() {
    for (auto& [id, n] : drafts_) store_.put(id, std::move(n));
    drafts_.clear();
}

std::pair<NodeId, std::uint64_t> tree_bulk_load(NodeStore& store, std::uint32_t q,
                                                std::vector<LeafElem> sorted,
                                                std::size_t leaf_fill, std::size_t inner_fill) {
    validate_branching(q);
    auto fill_ok = [&](std::size_t f) { return f >= q / 2 && f <= (std::size_t)q - 1; };
    if (!fill_ok(leaf_fill) || !fill_ok(inner_fill))
        throw std::invalid_argument("bulk load: fill outside [q/2, q-1]");
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (!(sorted[i - 1].key < sorted[i].key))
            throw std::invalid_argument("bulk load: keys not strictly sorted");

    std::uint64_t count = sorted.size();
    if (sorted.empty()) {
        TreeNode empty;
        NodeId id = store.alloc_id();
        store.put(id, std::move(empty));
        return {id, 0};
    }

    // choose a node count so every node lands in [q/2, q-1]
    auto layout = [&](std::size_t n, std::size_t fill) {
        std::size_t nodes = (n + fill - 1) / fill;
        if (n >= q / 2) nodes = std::min(nodes, n / (q / 2));
        if (nodes == 0) nodes = 1;
        std::vector<std::size_t> sizes(nodes, n / nodes);
        for (std::size_t i = 0; i < n % nodes; ++i) ++sizes[i];
        return sizes;
    };

    std::vector<std::pair<Key, NodeId>> level;  // (subtree max, id)
    {
        auto sizes = layout(sorted.size(), leaf_fill);
        std::size_t at = 0;
        for (std::size_t sz : sizes) {
            TreeNode leaf;
            leaf.elems.assign(std::make_move_iterator(sorted.begin() + (std::ptrdiff_t)at),
                              std::make_move_iterator(sorted.begin() + (std::ptrdiff_t)(at + sz)));
            at += sz;
            NodeId id = store.alloc_id();
            Key mx = leaf.elems.back().key;
            store.put(id, std::move(leaf));
            level.push_back({std::move(mx), id});
        }
    }
    while (level.size() > 1) {
        auto sizes = layout(level.size(), inner_fill);
        std::vector<std::pair<Key, NodeId>> next;
        std::size_t at = 0;
        for (std::size_t sz : sizes) {
            TreeNode inner;
            inner.leaf = false;
            for (std::size_t i = 0; i < sz; ++i)
                inner.inner.push_back({level[at + i].first, level[at + i].second});
            at += sz;
            NodeId id = store.alloc_id();
            Key mx = inner.inner.back().key;
            store.put(id, std::move(inner));
            next.push_back({std::move(mx), id});
        }
        level = std::move(next);
    }
    return {level[0].second, count};
}

}  // namespace bmt
