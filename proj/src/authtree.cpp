#include "bmt/authtree.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace bmt {

Fr salted_key(const Key& key, std::size_t index1) {
    if (index1 == 0 || index1 > 0xffff) throw std::invalid_argument("salted_key: bad index");
    std::vector<std::uint8_t> buf(key);
    buf.push_back((std::uint8_t)(index1 & 0xff));
    buf.push_back((std::uint8_t)(index1 >> 8));
    return hash_to_scalar(buf);
}

Fr value_scalar(const Digest& digest) { return hash_to_scalar(digest); }

Digest compute_node_hash(const std::array<std::uint8_t, 48>& commitment, NodeType type,
                         std::size_t count) {
    std::array<std::uint8_t, 48 + 1 + 2> buf{};
    std::memcpy(buf.data(), commitment.data(), 48);
    buf[48] = (std::uint8_t)type;
    buf[49] = (std::uint8_t)(count & 0xff);
    buf[50] = (std::uint8_t)(count >> 8);
    return sha256(buf);
}

Digest empty_root_hash() {
    std::uint8_t marker = 0x00;
    return sha256(std::span<const std::uint8_t>(&marker, 1));
}

std::array<std::uint8_t, RootRecord::kSerializedSize> RootRecord::serialize() const {
    std::array<std::uint8_t, kSerializedSize> out{};
    std::memcpy(out.data(), root_hash.data(), 32);
    std::memcpy(out.data() + 32, root_commitment.data(), 48);
    for (int i = 0; i < 8; ++i) out[80 + i] = (std::uint8_t)(element_count >> (8 * i));
    std::memcpy(out.data() + 88, previous.data(), 32);
    return out;
}

RootRecord RootRecord::deserialize(std::span<const std::uint8_t> in) {
    if (in.size() != kSerializedSize) throw std::invalid_argument("root record: bad length");
    RootRecord r;
    std::memcpy(r.root_hash.data(), in.data(), 32);
    std::memcpy(r.root_commitment.data(), in.data() + 32, 48);
    for (int i = 0; i < 8; ++i) r.element_count |= (std::uint64_t)in[80 + i] << (8 * i);
    std::memcpy(r.previous.data(), in.data() + 88, 32);
    return r;
}

RootRecord genesis_record() {
    RootRecord r;
    r.root_hash = empty_root_hash();
    r.root_commitment = serialize_g1(G1Affine::identity());
    r.element_count = 0;
    return r;
}

std::vector<std::pair<Fr, Fr>> node_points(const NodeView& view, const TreeNode& node) {
    std::vector<std::pair<Fr, Fr>> pts;
    pts.reserve(node.count());
    if (node.leaf) {
        for (std::size_t i = 0; i < node.elems.size(); ++i)
            pts.push_back({salted_key(node.elems[i].key, i + 1), value_scalar(node.elems[i].vdigest)});
    } else {
        for (std::size_t i = 0; i < node.inner.size(); ++i) {
            const Digest& child_hash = view.node(node.inner[i].child)->node_hash;
            pts.push_back({salted_key(node.inner[i].key, i + 1), value_scalar(child_hash)});
        }
    }
    return pts;
}

Poly recommit_node(const PublicParams& pp, const NodeView& view, TreeNode& node, NodeType type) {
    if (node.count() == 0) {
        // only the empty tree's root may be element-free
        node.commitment = serialize_g1(G1Affine::identity());
        node.node_hash = empty_root_hash();
        node.hash_type = (std::uint8_t)NodeType::root;
        return Poly::zero();
    }
    if (node.count() > pp.t)
        throw std::invalid_argument("recommit: node larger than degree bound");
    std::vector<std::pair<Fr, Fr>> pts = node_points(view, node);
    Poly poly;
    try {
        poly = interpolate(pts);
    } catch (const std::invalid_argument&) {
        throw std::logic_error("recommit: salted-key collision within a node");
    }
    node.commitment = commit(pp, poly).serialize();
    node.node_hash = compute_node_hash(node.commitment, type, node.count());
    node.hash_type = (std::uint8_t)type;
    return poly;
}

AuthTree::AuthTree(NodeStore& store, const PublicParams& pp, std::uint32_t q)
    : store_(store), pp_(pp), q_(q) {
    validate_branching(q);
    if ((std::size_t)q > pp.t + 1)
        throw std::invalid_argument("branching factor exceeds params degree bound");
    TreeNode empty;
    empty.commitment = serialize_g1(G1Affine::identity());
    empty.node_hash = empty_root_hash();
    empty.hash_type = (std::uint8_t)NodeType::root;
    root_ = store_.alloc_id();
    store_.put(root_, std::move(empty));
    rec_ = genesis_record();
}

AuthTree::AuthTree(NodeStore& store, const PublicParams& pp, std::uint32_t q, RootRecord rec,
                   NodeId root_id)
    : store_(store), pp_(pp), q_(q), root_(root_id), rec_(rec) {
    validate_branching(q);
    if ((std::size_t)q > pp.t + 1)
        throw std::invalid_argument("branching factor exceeds params degree bound");
}

AuthTree::ApplyResult AuthTree::apply_updates(std::span<const UpdateOp> ops) {
    if (ops.empty()) return {rec_, {}, false};

    TreeTxn txn(store_, q_, root_, rec_.element_count);
    for (const auto& op : ops) {
        if (op.is_insert) txn.insert(op.key, op.vdigest, op.voff, op.vlen);
        else txn.erase(op.key);
    }

    // recommit drafts children-first
    auto& drafts = txn.drafts();
    if (drafts.empty()) return {rec_, {}, false};  // every op was a no-op
    std::unordered_map<NodeId, bool> done;
    std::vector<NodeId> order;
    order.reserve(drafts.size());
    auto visit = [&](auto&& self, NodeId id) -> void {
        auto it = drafts.find(id);
        if (it == drafts.end()) return;  // stored node, hash already valid
        if (done.count(id)) return;
        done[id] = true;
        if (!it->second.leaf)
            for (const auto& e : it->second.inner) self(self, e.child);
        order.push_back(id);
    };
    for (auto& [id, n] : drafts) visit(visit, id);

    for (NodeId id : order) {
        TreeNode& n = drafts.at(id);
        NodeType type = id == txn.root() ? NodeType::root
                                         : (n.leaf ? NodeType::leaf : NodeType::internal);
        Poly p = recommit_node(pp_, txn, n, type);
        {
            std::lock_guard<std::mutex> lk(poly_mu_);
            poly_cache_[id] = std::move(p);
        }
    }

    RootRecord next;
    const TreeNode& root_node = drafts.count(txn.root()) ? drafts.at(txn.root())
                                                         : *store_.get(txn.root());
    next.root_hash = root_node.node_hash;
    next.root_commitment = root_node.commitment;
    next.element_count = txn.count();
    next.previous = rec_.root_hash;

    std::vector<NodeId> modified;
    modified.reserve(drafts.size());
    for (auto& [id, n] : drafts) modified.push_back(id);
    std::sort(modified.begin(), modified.end());

    root_ = txn.root();
    txn.commit();
    rec_ = next;
    return {rec_, std::move(modified), true};
}

const Poly& AuthTree::node_poly(NodeId id) const {
    {
        std::lock_guard<std::mutex> lk(poly_mu_);
        auto it = poly_cache_.find(id);
        if (it != poly_cache_.end()) return it->second;
    }
    auto n = store_.get(id);
    std::vector<std::pair<Fr, Fr>> pts = node_points(*this, *n);
    Poly p = interpolate(pts);
    std::lock_guard<std::mutex> lk(poly_mu_);
    auto [pos, ok] = poly_cache_.emplace(id, std::move(p));
    (void)ok;
    return pos->second;
}

}  // namespace bmt
