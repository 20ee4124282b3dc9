#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bmt/algebra.hpp"

namespace bmt {

inline constexpr std::size_t kMaxKeyLen = 512;

// Byte-string key, lexicographic order.
using Key = std::vector<std::uint8_t>;

using NodeId = std::uint64_t;

struct LeafElem {
    Key key;
    Digest vdigest{};          // 32-byte digest of the stored value
    std::uint64_t voff = 0;    // value-log position
    std::uint32_t vlen = 0;
};

struct InnerElem {
    Key key;        // exact maximum key of the child subtree
    NodeId child = 0;
};

struct TreeNode {
    bool leaf = true;
    std::vector<LeafElem> elems;    // leaf payload
    std::vector<InnerElem> inner;   // internal payload
    // authentication overlay, filled before publication
    std::array<std::uint8_t, 48> commitment{};
    Digest node_hash{};
    std::uint8_t hash_type = 2;     // type byte the hash was computed with

    std::size_t count() const { return leaf ? elems.size() : inner.size(); }
    const Key& key_at(std::size_t i) const { return leaf ? elems[i].key : inner[i].key; }
    const Key& max_key() const { return key_at(count() - 1); }
};

class NodeStore {
public:
    virtual ~NodeStore() = default;
    virtual NodeId alloc_id() = 0;
    virtual void put(NodeId id, TreeNode node) = 0;
    virtual std::shared_ptr<const TreeNode> get(NodeId id) const = 0;
};

class MemNodeStore : public NodeStore {
public:
    NodeId alloc_id() override { return next_++; }
    void put(NodeId id, TreeNode node) override {
        nodes_[id] = std::make_shared<const TreeNode>(std::move(node));
    }
    std::shared_ptr<const TreeNode> get(NodeId id) const override {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw std::runtime_error("node store: unknown node id");
        return it->second;
    }

private:
    NodeId next_ = 1;
    std::unordered_map<NodeId, std::shared_ptr<const TreeNode>> nodes_;
};

struct PathStep {
    NodeId id;
    std::size_t slot;
};

struct SearchResult {
    bool found = false;
    std::optional<LeafElem> elem;
    std::vector<PathStep> path;  // root to leaf; slot is descent choice / leaf position
};

// Draft-aware node view used by searches inside a transaction.
class NodeView {
public:
    virtual ~NodeView() = default;
    virtual std::shared_ptr<const TreeNode> node(NodeId id) const = 0;
};

class StoreView : public NodeView {
public:
    explicit StoreView(const NodeStore& s) : s_(s) {}
    std::shared_ptr<const TreeNode> node(NodeId id) const override { return s_.get(id); }

private:
    const NodeStore& s_;
};

SearchResult tree_search(const NodeView& view, NodeId root, const Key& key);

std::vector<LeafElem> tree_range_scan(const NodeView& view, NodeId root, const Key& lo,
                                      const Key& hi);

// Full structural validation: ordering, occupancy, uniform depth, exact-max
// separators, element count. Throws std::logic_error on violation.
void tree_check_invariants(const NodeView& view, NodeId root, std::uint32_t q,
                           std::uint64_t expect_count);

std::size_t tree_height(const NodeView& view, NodeId root);

// One copy-on-write mutation batch. Touched nodes become drafts with fresh
// ids; commit() publishes every draft to the store.
class TreeTxn : public NodeView {
public:
    TreeTxn(NodeStore& store, std::uint32_t q, NodeId root, std::uint64_t count);

    // Returns true when the key was newly inserted (false: value update).
    bool insert(const Key& key, const Digest& vdigest, std::uint64_t voff, std::uint32_t vlen);

    // Returns false when the key was absent (no-op).
    bool erase(const Key& key);

    NodeId root() const { return root_; }
    std::uint64_t count() const { return count_; }

    std::unordered_map<NodeId, TreeNode>& drafts() { return drafts_; }
    std::shared_ptr<const TreeNode> node(NodeId id) const override;

    void commit();

private:
    struct Split {
        bool happened = false;
        NodeId right_id = 0;
    };

    TreeNode& draft(NodeId id);                    // in-place when already drafted
    std::pair<NodeId, TreeNode*> draft_cow(NodeId id);  // fresh id otherwise

    Split insert_rec(NodeId& id, const Key& key, const Digest& vd, std::uint64_t voff,
                     std::uint32_t vlen, bool& was_new);
    void erase_rec(NodeId& id, const Key& key);
    void rebalance_child(TreeNode& parent, std::size_t slot);

    NodeStore& store_;
    std::uint32_t q_;
    NodeId root_;
    std::uint64_t count_ = 0;
    std::unordered_map<NodeId, TreeNode> drafts_;
};

// Bottom-up bulk construction from sorted unique leaf elements with a chosen
// per-node fill; returns {root, count}. fill must lie in [q/2, q-1].
std::pair<NodeId, std::uint64_t> tree_bulk_load(NodeStore& store, std::uint32_t q,
                                                std::vector<LeafElem> sorted,
                                                std::size_t leaf_fill, std::size_t inner_fill);

void validate_branching(std::uint32_t q);

}  // namespace bmt
