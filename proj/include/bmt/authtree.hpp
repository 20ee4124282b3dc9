#pragma once

#include <mutex>

#include "bmt/btree.hpp"
#include "bmt/polycommit.hpp"

namespace bmt {

// type byte hashed into node_hash: root=0, internal=1, leaf=2
enum class NodeType : std::uint8_t { root = 0, internal = 1, leaf = 2 };

// Evaluation point for the element at 1-based sorted position `index1`.
Fr salted_key(const Key& key, std::size_t index1);

// Committed value: hash_to_scalar of the child node hash (internal) or of
// the value digest (leaf). Both are 32-byte digests, so one function serves.
Fr value_scalar(const Digest& digest);

// node_hash = H(C || type || count_le16). The element count is bound in so
// that "index == count" attestations (tree-boundary and adjacency proofs)
// are sound; the commitment alone does not fix the number of elements.
Digest compute_node_hash(const std::array<std::uint8_t, 48>& commitment, NodeType type,
                         std::size_t count);

Digest empty_root_hash();

struct RootRecord {
    Digest root_hash{};
    std::array<std::uint8_t, 48> root_commitment{};
    std::uint64_t element_count = 0;
    Digest previous{};  // all-zero for the genesis record

    static constexpr std::size_t kSerializedSize = 32 + 48 + 8 + 32;
    std::array<std::uint8_t, kSerializedSize> serialize() const;
    static RootRecord deserialize(std::span<const std::uint8_t> in);
    bool operator==(const RootRecord& o) const = default;
};

RootRecord genesis_record();

struct UpdateOp {
    bool is_insert = true;
    Key key;
    Digest vdigest{};
    std::uint64_t voff = 0;
    std::uint32_t vlen = 0;

    static UpdateOp insert(Key k, Digest d, std::uint64_t off = 0, std::uint32_t len = 0) {
        return {true, std::move(k), d, off, len};
    }
    static UpdateOp remove(Key k) { return {false, std::move(k), {}, 0, 0}; }
};

// Interpolation input for one node: (salted key -> value scalar) pairs.
std::vector<std::pair<Fr, Fr>> node_points(const NodeView& view, const TreeNode& node);

// Recomputes commitment and node_hash in place; returns the cached poly.
Poly recommit_node(const PublicParams& pp, const NodeView& view, TreeNode& node, NodeType type);

// Authenticated tree: B+ tree plus per-node commitments and a root history.
class AuthTree : public NodeView {
public:
    // fresh empty tree with a genesis record
    AuthTree(NodeStore& store, const PublicParams& pp, std::uint32_t q);

    // attach to an existing version
    AuthTree(NodeStore& store, const PublicParams& pp, std::uint32_t q, RootRecord rec,
             NodeId root_id);

    struct ApplyResult {
        RootRecord record;
        std::vector<NodeId> modified;
        bool published = false;  // false for an empty batch
    };

    // Applies all mutations, then recommits every modified node exactly once,
    // children before parents, and forms the successor RootRecord.
    ApplyResult apply_updates(std::span<const UpdateOp> ops);

    const RootRecord& record() const { return rec_; }
    NodeId root_id() const { return root_; }
    std::uint32_t q() const { return q_; }
    const PublicParams& params() const { return pp_; }
    NodeStore& store() const { return store_; }

    std::shared_ptr<const TreeNode> node(NodeId id) const override { return store_.get(id); }

    SearchResult search(const Key& key) const { return tree_search(*this, root_, key); }
    std::vector<LeafElem> range_scan(const Key& lo, const Key& hi) const {
        return tree_range_scan(*this, root_, lo, hi);
    }
    std::size_t height() const { return tree_height(*this, root_); }

    NodeType type_of(NodeId id, const TreeNode& n) const {
        return id == root_ ? NodeType::root : (n.leaf ? NodeType::leaf : NodeType::internal);
    }

    // Cached node polynomial; reinterpolated on demand for loaded snapshots.
    const Poly& node_poly(NodeId id) const;

private:
    NodeStore& store_;
    const PublicParams& pp_;
    std::uint32_t q_;
    NodeId root_ = 0;
    RootRecord rec_;
    mutable std::mutex poly_mu_;  // provers may share one snapshot
    mutable std::unordered_map<NodeId, Poly> poly_cache_;
};

}  // namespace bmt
