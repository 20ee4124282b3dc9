#include "bmt/proofs.hpp"

#include <algorithm>
#include <cstring>
#include <optional>
#include <random>
#include <set>

namespace bmt {

namespace {

// ---------------------------------------------------------------- provers

std::vector<Fr> record_salts(const LevelRecord& r) {
    std::vector<Fr> salts;
    salts.reserve(r.opened.size());
    for (const auto& o : r.opened) salts.push_back(salted_key(o.key, o.index1));
    return salts;
}

LevelRecord make_record(const AuthTree& t, NodeId id, std::vector<std::size_t> slots0,
                        std::uint8_t parent_rec, std::uint32_t parent_slot) {
    auto n = t.node(id);
    LevelRecord r;
    r.parent_rec = parent_rec;
    r.parent_slot = parent_slot;
    r.type = (std::uint8_t)t.type_of(id, *n);
    r.count = (std::uint32_t)n->count();
    r.commitment = n->commitment;
    std::sort(slots0.begin(), slots0.end());
    slots0.erase(std::unique(slots0.begin(), slots0.end()), slots0.end());
    for (std::size_t s : slots0) {
        OpenedElem o;
        o.key = n->key_at(s);
        o.index1 = (std::uint32_t)(s + 1);
        if (n->leaf) o.digest = n->elems[s].vdigest;
        else o.digest = t.node(n->inner[s].child)->node_hash;
        r.opened.push_back(std::move(o));
    }
    Witness w = create_batch_witness(t.params(), t.node_poly(id), record_salts(r));
    r.witness = w.serialize();
    return r;
}

// Path to the global predecessor of `key` (strictly smaller), if any.
std::optional<std::vector<PathStep>> predecessor_path(const AuthTree& t, const Key& key) {
    SearchResult sr = t.search(key);
    std::size_t pos = sr.path.back().slot;  // lower_bound position
    if (pos > 0) {
        auto p = sr.path;
        p.back().slot = pos - 1;
        return p;
    }
    for (std::size_t lvl = sr.path.size() - 1; lvl-- > 0;) {
        if (sr.path[lvl].slot > 0) {
            std::vector<PathStep> p(sr.path.begin(), sr.path.begin() + (std::ptrdiff_t)lvl + 1);
            p.back().slot -= 1;
            NodeId cur = t.node(p.back().id)->inner[p.back().slot].child;
            for (;;) {
                auto n = t.node(cur);
                p.push_back({cur, n->count() - 1});
                if (n->leaf) break;
                cur = n->inner[n->count() - 1].child;
            }
            return p;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<PathStep>> successor_path(const AuthTree& t, const Key& key,
                                                    bool strictly_greater) {
    SearchResult sr = t.search(key);
    auto leaf = t.node(sr.path.back().id);
    std::size_t pos = sr.path.back().slot;
    if (sr.found && strictly_greater) ++pos;
    if (pos < leaf->count()) {
        auto p = sr.path;
        p.back().slot = pos;
        return p;
    }
    for (std::size_t lvl = sr.path.size() - 1; lvl-- > 0;) {
        auto n = t.node(sr.path[lvl].id);
        if (sr.path[lvl].slot + 1 < n->count()) {
            std::vector<PathStep> p(sr.path.begin(), sr.path.begin() + (std::ptrdiff_t)lvl + 1);
            p.back().slot += 1;
            NodeId cur = n->inner[p.back().slot].child;
            for (;;) {
                auto c = t.node(cur);
                p.push_back({cur, 0});
                if (c->leaf) break;
                cur = c->inner[0].child;
            }
            return p;
        }
    }
    return std::nullopt;
}

}  // namespace

MembershipProof prove_membership(const AuthTree& tree, const Key& key) {
    SearchResult sr = tree.search(key);
    if (!sr.found) throw std::invalid_argument("prove_membership: key absent");
    MembershipProof proof;
    for (std::size_t lvl = 0; lvl < sr.path.size(); ++lvl) {
        std::uint8_t prec = lvl == 0 ? 0xff : 0;
        proof.levels.push_back(
            make_record(tree, sr.path[lvl].id, {sr.path[lvl].slot}, prec, 0));
    }
    return proof;
}

NonMembershipProof prove_nonmembership(const AuthTree& tree, const Key& key) {
    if (tree.record().element_count == 0)
        return NonMembershipProof{BoundKind::empty_tree, 0, {}};
    SearchResult sr = tree.search(key);
    if (sr.found) throw std::invalid_argument("prove_nonmembership: key present");

    auto leaf = tree.node(sr.path.back().id);
    std::size_t pos = sr.path.back().slot;
    bool pred_here = pos > 0;
    bool succ_here = pos < leaf->count();
    NonMembershipProof proof;

    if (pred_here && succ_here) {
        proof.kind = BoundKind::case1;
        proof.interval_level = (std::uint32_t)(sr.path.size() - 1);
        for (std::size_t lvl = 0; lvl + 1 < sr.path.size(); ++lvl)
            proof.levels.push_back({make_record(tree, sr.path[lvl].id, {sr.path[lvl].slot},
                                                lvl == 0 ? 0xff : 0, 0)});
        proof.levels.push_back(
            {make_record(tree, sr.path.back().id, {pos - 1, pos}, sr.path.size() == 1 ? 0xff : 0, 0)});
        return proof;
    }

    auto ppath = predecessor_path(tree, key);
    auto spath = successor_path(tree, key, false);
    if (!ppath) {
        proof.kind = BoundKind::low;
        proof.interval_level = (std::uint32_t)(sr.path.size() - 1);
        auto& p = *spath;
        for (std::size_t lvl = 0; lvl < p.size(); ++lvl) {
            if (p[lvl].slot != 0) throw std::logic_error("low-boundary path not leftmost");
            proof.levels.push_back({make_record(tree, p[lvl].id, {0}, lvl == 0 ? 0xff : 0, 0)});
        }
        return proof;
    }
    if (!spath) {
        proof.kind = BoundKind::high;
        proof.interval_level = (std::uint32_t)(sr.path.size() - 1);
        auto& p = *ppath;
        for (std::size_t lvl = 0; lvl < p.size(); ++lvl) {
            auto n = tree.node(p[lvl].id);
            if (p[lvl].slot != n->count() - 1) throw std::logic_error("high-boundary path not rightmost");
            proof.levels.push_back({make_record(tree, p[lvl].id, {p[lvl].slot}, lvl == 0 ? 0xff : 0, 0)});
        }
        return proof;
    }

    // case 2: bracketing neighbours in different leaves
    auto& pp = *ppath;
    auto& sp = *spath;
    std::size_t d = 0;
    while (d < pp.size() && pp[d].id == sp[d].id && pp[d].slot == sp[d].slot) ++d;
    if (d >= pp.size() || pp[d].id != sp[d].id || pp[d].slot + 1 != sp[d].slot)
        throw std::logic_error("case2: paths do not diverge at adjacent slots");
    proof.kind = BoundKind::case2;
    proof.interval_level = (std::uint32_t)d;
    for (std::size_t lvl = 0; lvl < d; ++lvl)
        proof.levels.push_back({make_record(tree, pp[lvl].id, {pp[lvl].slot}, lvl == 0 ? 0xff : 0, 0)});
    {
        LevelRecord r = make_record(tree, pp[d].id, {pp[d].slot, sp[d].slot}, d == 0 ? 0xff : 0, 0);
        proof.levels.push_back({r});
    }
    for (std::size_t lvl = d + 1; lvl < pp.size(); ++lvl) {
        // directly below the interval node both chains hang off record 0, at
        // its two opened slots; further down each follows its own record
        std::uint8_t rparent = lvl == d + 1 ? 0 : 1;
        std::uint32_t rslot = lvl == d + 1 ? 1 : 0;
        LevelRecord lrec = make_record(tree, pp[lvl].id, {pp[lvl].slot}, 0, 0);
        LevelRecord rrec = make_record(tree, sp[lvl].id, {sp[lvl].slot}, rparent, rslot);
        proof.levels.push_back({std::move(lrec), std::move(rrec)});
    }
    return proof;
}

namespace {

// groups the in-range leaf elements by owning leaf, left to right
void range_by_leaf(const AuthTree& t, NodeId id, const Key& lo, const Key& hi,
                   std::vector<std::pair<NodeId, std::vector<LeafElem>>>& out) {
    auto n = t.node(id);
    if (n->leaf) {
        std::vector<LeafElem> part;
        for (const auto& e : n->elems)
            if (!(e.key < lo) && !(hi < e.key)) part.push_back(e);
        if (!part.empty()) out.push_back({id, std::move(part)});
        return;
    }
    for (std::size_t i = 0; i < n->inner.size(); ++i) {
        if (n->inner[i].key < lo) continue;
        if (i > 0 && !(n->inner[i - 1].key < hi)) break;
        range_by_leaf(t, n->inner[i].child, lo, hi, out);
    }
}

struct RoleSlots {
    NodeId id = 0;
    std::size_t s_slot = SIZE_MAX, t_slot = SIZE_MAX;
    std::size_t pred_slot = SIZE_MAX, succ_slot = SIZE_MAX;
};

}  // namespace

RangeProof prove_range(const AuthTree& tree, const Key& lo, const Key& hi) {
    if (hi < lo) throw std::invalid_argument("prove_range: lo > hi");
    RangeProof proof;

    std::vector<std::pair<NodeId, std::vector<LeafElem>>> groups;
    if (tree.record().element_count > 0) range_by_leaf(tree, tree.root_id(), lo, hi, groups);

    if (groups.empty()) {
        NonMembershipProof nm = prove_nonmembership(tree, lo);
        proof.left_kind = (std::uint8_t)nm.kind;
        proof.right_kind = kEmptyRange;
        proof.aux_level = nm.interval_level;
        proof.levels = std::move(nm.levels);
        return proof;
    }

    const Key& s = groups.front().second.front().key;
    const Key& t = groups.back().second.back().key;
    SearchResult ssr = tree.search(s);
    SearchResult tsr = tree.search(t);
    const std::size_t depth = ssr.path.size();

    std::optional<std::vector<PathStep>> ppath, spath;
    BoundKind lk, rk;
    if (s == lo) lk = BoundKind::member;
    else {
        ppath = predecessor_path(tree, lo);
        if (!ppath) lk = BoundKind::low;
        else if (ppath->back().id == ssr.path.back().id) { lk = BoundKind::case1; }
        else lk = BoundKind::case2;
        if (lk == BoundKind::case1) ppath.reset();  // anchor lives inside the s-leaf record
    }
    if (t == hi) rk = BoundKind::member;
    else {
        spath = successor_path(tree, hi, true);
        if (!spath) rk = BoundKind::high;
        else if (spath->back().id == tsr.path.back().id) { rk = BoundKind::case1; }
        else rk = BoundKind::case2;
        if (rk == BoundKind::case1) spath.reset();
    }
    proof.left_kind = (std::uint8_t)lk;
    proof.right_kind = (std::uint8_t)rk;

    // per-level role table
    std::vector<std::vector<RoleSlots>> roles(depth);
    auto role_at = [&](std::size_t lvl, NodeId id) -> RoleSlots& {
        for (auto& r : roles[lvl])
            if (r.id == id) return r;
        roles[lvl].push_back(RoleSlots{id});
        return roles[lvl].back();
    };
    for (std::size_t lvl = 0; lvl < depth; ++lvl) {
        if (ppath) role_at(lvl, (*ppath)[lvl].id).pred_slot = (*ppath)[lvl].slot;
        role_at(lvl, ssr.path[lvl].id).s_slot = ssr.path[lvl].slot;
        role_at(lvl, tsr.path[lvl].id).t_slot = tsr.path[lvl].slot;
        if (spath) role_at(lvl, (*spath)[lvl].id).succ_slot = (*spath)[lvl].slot;
    }
    // case-1 anchors live inside the boundary leaf itself
    if (lk == BoundKind::case1)
        role_at(depth - 1, ssr.path.back().id).pred_slot = ssr.path.back().slot - 1;
    if (rk == BoundKind::case1)
        role_at(depth - 1, tsr.path.back().id).succ_slot = tsr.path.back().slot + 1;
    // keep canonical left-to-right order: pred -> s -> t -> succ
    for (auto& lvlroles : roles) {
        std::stable_sort(lvlroles.begin(), lvlroles.end(),
                         [&](const RoleSlots& a, const RoleSlots& b) {
            auto rank = [](const RoleSlots& r) {
                if (r.s_slot != SIZE_MAX) return 1;
                if (r.t_slot != SIZE_MAX) return 2;
                if (r.pred_slot != SIZE_MAX) return 0;
                return 3;
            };
            return rank(a) < rank(b);
        });
    }

    // opened slots per record + full (non-path) children per level
    std::vector<std::vector<LevelRecord>> levels(depth);
    std::vector<std::vector<std::size_t>> record_node_pos(depth);  // role index per record
    struct FullNode { NodeId id; std::size_t container; };
    std::vector<std::vector<FullNode>> fulls(depth);  // fully-in-range nodes per level

    for (std::size_t lvl = 0; lvl < depth; ++lvl) {
        for (std::size_t ri = 0; ri < roles[lvl].size(); ++ri) {
            RoleSlots& r = roles[lvl][ri];
            auto n = tree.node(r.id);
            std::vector<std::size_t> slots;
            if (r.s_slot != SIZE_MAX) {
                std::size_t last = r.t_slot != SIZE_MAX ? r.t_slot : n->count() - 1;
                for (std::size_t s2 = r.s_slot; s2 <= last; ++s2) slots.push_back(s2);
            } else if (r.t_slot != SIZE_MAX) {
                for (std::size_t s2 = 0; s2 <= r.t_slot; ++s2) slots.push_back(s2);
            }
            if (r.pred_slot != SIZE_MAX) {
                if (r.s_slot == SIZE_MAX) slots.push_back(r.pred_slot);            // pure pred node
                else if (r.pred_slot + 1 == r.s_slot) slots.push_back(r.pred_slot);  // divergence
                // equal slots above the divergence add nothing
            }
            if (r.succ_slot != SIZE_MAX) {
                if (r.t_slot == SIZE_MAX) slots.push_back(r.succ_slot);
                else if (r.succ_slot == r.t_slot + 1) slots.push_back(r.succ_slot);
            }
            // parent wiring
            std::uint8_t prec = 0xff;
            std::uint32_t pslot = 0;
            if (lvl > 0) {
                bool found = false;
                for (std::size_t pi = 0; pi < roles[lvl - 1].size() && !found; ++pi) {
                    auto pn = tree.node(roles[lvl - 1][pi].id);
                    for (std::size_t oi = 0; oi < levels[lvl - 1][pi].opened.size(); ++oi) {
                        std::size_t slot0 = levels[lvl - 1][pi].opened[oi].index1 - 1;
                        if (pn->inner[slot0].child == r.id) {
                            prec = (std::uint8_t)pi;
                            pslot = (std::uint32_t)oi;
                            found = true;
                            break;
                        }
                    }
                }
                if (!found) throw std::logic_error("prove_range: record parent not opened");
            }
            levels[lvl].push_back(make_record(tree, r.id, slots, prec, pslot));
            record_node_pos[lvl].push_back(ri);
        }
        // full children of this level's containers land at level lvl+1,
        // in tree order: s-record fulls, middle subtrees, t-record fulls
        if (lvl + 1 < depth) {
            std::size_t container = 0;
            auto emit_full_children = [&](NodeId id, const std::vector<std::size_t>& child_slots) {
                auto n = tree.node(id);
                for (std::size_t s2 : child_slots) fulls[lvl + 1].push_back({n->inner[s2].child, container});
                ++container;
            };
            auto record_fulls = [&](std::size_t ri) {
                RoleSlots& r = roles[lvl][ri];
                std::vector<std::size_t> child_slots;
                for (const auto& o : levels[lvl][ri].opened) {
                    std::size_t s2 = o.index1 - 1;
                    if (s2 == r.s_slot || s2 == r.t_slot || s2 == r.pred_slot || s2 == r.succ_slot)
                        continue;
                    child_slots.push_back(s2);
                }
                emit_full_children(r.id, child_slots);
            };
            std::size_t s_ri = SIZE_MAX, t_ri = SIZE_MAX;
            for (std::size_t ri = 0; ri < roles[lvl].size(); ++ri) {
                if (roles[lvl][ri].s_slot != SIZE_MAX) s_ri = ri;
                if (roles[lvl][ri].t_slot != SIZE_MAX && roles[lvl][ri].s_slot == SIZE_MAX) t_ri = ri;
            }
            record_fulls(s_ri);
            for (const auto& f : fulls[lvl]) {
                auto n = tree.node(f.id);
                std::vector<std::size_t> all(n->count());
                for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                emit_full_children(f.id, all);
            }
            if (t_ri != SIZE_MAX) record_fulls(t_ri);
        }
    }
    proof.levels = std::move(levels);

    // bit vectors: grouping of level-(j+1) objects under level-j containers
    proof.bit_vectors.resize(depth);
    for (std::size_t lvl = 0; lvl + 1 < depth; ++lvl) {
        auto& vec = proof.bit_vectors[lvl];
        const auto& objs = fulls[lvl + 1];
        vec.resize(objs.size(), false);
        for (std::size_t i = 0; i < objs.size(); ++i)
            if (i + 1 == objs.size() || objs[i + 1].container != objs[i].container) vec[i] = true;
    }
    {
        auto& leafvec = proof.bit_vectors[depth - 1];
        std::size_t m = 0;
        for (auto& g : groups) m += g.second.size();
        leafvec.resize(m, false);
        std::size_t at = 0;
        for (auto& g : groups) {
            at += g.second.size();
            leafvec[at - 1] = true;
        }
    }
    for (auto& g : groups)
        for (auto& e : g.second) proof.interior.push_back({e.key, e.vdigest});
    return proof;
}

std::size_t range_bit_count(const RangeProof& p) {
    std::size_t total = 0;
    for (const auto& v : p.bit_vectors) total += v.size();
    return total;
}

// ------------------------------------------------------------ serialization

namespace {

constexpr std::uint8_t kProofVersion = 1;
constexpr std::size_t kMaxLevels = 64;
constexpr std::size_t kMaxRecords = 8;

struct Writer {
    Bytes out;
    void u8(std::uint8_t v) { out.push_back(v); }
    void u16(std::uint16_t v) {
        out.push_back((std::uint8_t)(v & 0xff));
        out.push_back((std::uint8_t)(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back((std::uint8_t)(v >> (8 * i)));
    }
    void raw(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
};

struct Reader {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > in.size()) throw std::invalid_argument("proof: truncated");
    }
    std::uint8_t u8() {
        need(1);
        return in[pos++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = (std::uint16_t)(in[pos] | (in[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= (std::uint32_t)in[pos + i] << (8 * i);
        pos += 4;
        return v;
    }
    void raw(std::span<std::uint8_t> b) {
        need(b.size());
        std::memcpy(b.data(), in.data() + pos, b.size());
        pos += b.size();
    }
    Key key() {
        std::uint16_t len = u16();
        if (len > kMaxKeyLen) throw std::invalid_argument("proof: key too long");
        Key k(len);
        raw(k);
        return k;
    }
    void done() const {
        if (pos != in.size()) throw std::invalid_argument("proof: trailing bytes");
    }
};

void write_record(Writer& w, const LevelRecord& r) {
    w.u8(r.parent_rec);
    w.u16((std::uint16_t)r.parent_slot);
    w.u8(r.type);
    w.u16((std::uint16_t)r.count);
    w.raw(r.commitment);
    w.u16((std::uint16_t)r.opened.size());
    for (const auto& o : r.opened) {
        w.u16((std::uint16_t)o.key.size());
        w.raw(o.key);
        w.u16((std::uint16_t)o.index1);
        w.raw(o.digest);
    }
    w.raw(r.witness);
}

LevelRecord read_record(Reader& rd) {
    LevelRecord r;
    r.parent_rec = rd.u8();
    r.parent_slot = rd.u16();
    r.type = rd.u8();
    r.count = rd.u16();
    rd.raw(r.commitment);
    std::size_t n = rd.u16();
    if (n > 0xffff) throw std::invalid_argument("proof: opened count");
    r.opened.resize(n);
    for (auto& o : r.opened) {
        o.key = rd.key();
        o.index1 = rd.u16();
        rd.raw(o.digest);
    }
    rd.raw(r.witness);
    return r;
}

void write_levels(Writer& w, const LevelVec& levels) {
    w.u16((std::uint16_t)levels.size());
    for (const auto& lvl : levels) {
        w.u8((std::uint8_t)lvl.size());
        for (const auto& r : lvl) write_record(w, r);
    }
}

LevelVec read_levels(Reader& rd) {
    std::size_t n = rd.u16();
    if (n > kMaxLevels) throw std::invalid_argument("proof: too many levels");
    LevelVec levels(n);
    for (auto& lvl : levels) {
        std::size_t m = rd.u8();
        if (m < 1 || m > kMaxRecords) throw std::invalid_argument("proof: record count");
        lvl.resize(m);
        for (auto& r : lvl) r = read_record(rd);
    }
    return levels;
}

}  // namespace

Bytes serialize_proof(const MembershipProof& p) {
    Writer w;
    w.u8(kProofVersion);
    w.u8((std::uint8_t)ProofType::membership);
    LevelVec lv;
    for (const auto& r : p.levels) lv.push_back({r});
    write_levels(w, lv);
    return std::move(w.out);
}

Bytes serialize_proof(const NonMembershipProof& p) {
    Writer w;
    w.u8(kProofVersion);
    w.u8((std::uint8_t)ProofType::nonmembership);
    w.u8((std::uint8_t)p.kind);
    w.u16((std::uint16_t)p.interval_level);
    write_levels(w, p.levels);
    return std::move(w.out);
}

Bytes serialize_proof(const RangeProof& p) {
    Writer w;
    w.u8(kProofVersion);
    w.u8((std::uint8_t)ProofType::range);
    w.u8(p.left_kind);
    w.u8(p.right_kind);
    w.u16((std::uint16_t)p.aux_level);
    write_levels(w, p.levels);
    w.u16((std::uint16_t)p.bit_vectors.size());
    for (const auto& v : p.bit_vectors) {
        w.u32((std::uint32_t)v.size());
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i]) acc |= (std::uint8_t)(1u << (i % 8));
            if (i % 8 == 7 || i + 1 == v.size()) {
                w.u8(acc);
                acc = 0;
            }
        }
    }
    w.u32((std::uint32_t)p.interior.size());
    for (const auto& [k, d] : p.interior) {
        w.u16((std::uint16_t)k.size());
        w.raw(k);
        w.raw(d);
    }
    return std::move(w.out);
}

ProofType peek_proof_type(std::span<const std::uint8_t> in) {
    if (in.size() < 2 || in[0] != kProofVersion) throw std::invalid_argument("proof: bad header");
    std::uint8_t t = in[1];
    if (t < 1 || t > 3) throw std::invalid_argument("proof: unknown type");
    return (ProofType)t;
}

MembershipProof parse_membership(std::span<const std::uint8_t> in) {
    Reader rd{in};
    if (rd.u8() != kProofVersion) throw std::invalid_argument("proof: bad version");
    if (rd.u8() != (std::uint8_t)ProofType::membership)
        throw std::invalid_argument("proof: not a membership proof");
    LevelVec lv = read_levels(rd);
    rd.done();
    MembershipProof p;
    for (auto& lvl : lv) {
        if (lvl.size() != 1) throw std::invalid_argument("proof: membership needs single records");
        p.levels.push_back(std::move(lvl[0]));
    }
    return p;
}

NonMembershipProof parse_nonmembership(std::span<const std::uint8_t> in) {
    Reader rd{in};
    if (rd.u8() != kProofVersion) throw std::invalid_argument("proof: bad version");
    if (rd.u8() != (std::uint8_t)ProofType::nonmembership)
        throw std::invalid_argument("proof: not a non-membership proof");
    NonMembershipProof p;
    std::uint8_t k = rd.u8();
    if (k > (std::uint8_t)BoundKind::empty_tree || k == (std::uint8_t)BoundKind::member)
        throw std::invalid_argument("proof: bad kind");
    p.kind = (BoundKind)k;
    p.interval_level = rd.u16();
    p.levels = read_levels(rd);
    rd.done();
    return p;
}

RangeProof parse_range(std::span<const std::uint8_t> in) {
    Reader rd{in};
    if (rd.u8() != kProofVersion) throw std::invalid_argument("proof: bad version");
    if (rd.u8() != (std::uint8_t)ProofType::range)
        throw std::invalid_argument("proof: not a range proof");
    RangeProof p;
    p.left_kind = rd.u8();
    p.right_kind = rd.u8();
    p.aux_level = rd.u16();
    p.levels = read_levels(rd);
    std::size_t nv = rd.u16();
    if (nv > kMaxLevels) throw std::invalid_argument("proof: too many bit vectors");
    p.bit_vectors.resize(nv);
    for (auto& v : p.bit_vectors) {
        std::size_t bits = rd.u32();
        if (bits > (1u << 24)) throw std::invalid_argument("proof: bit vector too large");
        v.resize(bits);
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < bits; ++i) {
            if (i % 8 == 0) acc = rd.u8();
            v[i] = (acc >> (i % 8)) & 1;
        }
    }
    std::size_t ni = rd.u32();
    if (ni > (1u << 24)) throw std::invalid_argument("proof: interior too large");
    p.interior.resize(ni);
    for (auto& [k, d] : p.interior) {
        k = rd.key();
        rd.raw(d);
    }
    rd.done();
    return p;
}

// --------------------------------------------------------------- verifiers

namespace {

Fr verifier_rand() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    Limbs<4> l{};
    do {
        for (auto& x : l) x = rng();
    } while (limb::cmp(l, Fr::MOD) >= 0);
    return Fr::from_canonical(l);
}

struct BatchItem {
    G1Affine c;
    std::vector<std::pair<Fr, Fr>> pts;
    G1Affine w;
};

// Aggregated pairing check over all records: one random linear combination,
// one Miller pair per record plus one shared left pair.
bool verify_batches(const PublicParams& pp, const std::vector<BatchItem>& items) {
    std::vector<std::pair<G1Affine, G2Affine>> pairs;
    pairs.reserve(items.size() + 1);
    G1 lhs = G1::identity();
    for (const auto& it : items) {
        if (it.pts.size() >= pp.g2_powers.size()) return false;
        Poly r = interpolate(it.pts);
        std::vector<Fr> xs(it.pts.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = it.pts[i].first;
        Poly z = vanishing_poly(xs);
        Fr rho = verifier_rand();
        G1 li = G1::from_affine(it.c);
        if (!r.is_zero()) li = li.add(G1::from_affine(commit(pp, r).point).negate());
        lhs = lhs.add(li.mul(rho));
        std::span<const G2Affine> bases(pp.g2_powers.data(), z.c.size());
        G2 zq = multi_scalar_mul(bases, z.c);
        pairs.push_back({G1::from_affine(it.w).mul(rho).negate().to_affine(), zq.to_affine()});
    }
    pairs.push_back({lhs.to_affine(), pp.g2_powers[0]});
    return pairing_product_is_one(pairs);
}

// Structural and cryptographic validation shared by all proof types: type
// bytes by depth, consecutive 1-based indices, sorted keys, the node-hash
// chain from the root record down, and the batch openings.
bool validate_chain(const PublicParams& pp, const RootRecord& root, const LevelVec& levels) {
    if (levels.empty() || levels.size() > kMaxLevels) return false;
    if (levels[0].size() != 1) return false;
    std::vector<BatchItem> items;
    for (std::size_t lvl = 0; lvl < levels.size(); ++lvl) {
        if (levels[lvl].empty() || levels[lvl].size() > kMaxRecords) return false;
        std::pair<int, int> prev_ref{-1, -1};
        for (std::size_t ri = 0; ri < levels[lvl].size(); ++ri) {
            const LevelRecord& r = levels[lvl][ri];
            std::uint8_t want = lvl == 0 ? (std::uint8_t)NodeType::root
                                         : (lvl + 1 == levels.size() ? (std::uint8_t)NodeType::leaf
                                                                     : (std::uint8_t)NodeType::internal);
            if (r.type != want) return false;
            if (r.count < 1 || r.count > 0xffff) return false;
            if (r.opened.empty() || r.opened.size() > r.count) return false;
            for (std::size_t i = 0; i < r.opened.size(); ++i) {
                const auto& o = r.opened[i];
                if (o.index1 < 1 || o.index1 > r.count) return false;
                if (o.key.size() > kMaxKeyLen) return false;
                if (i > 0) {
                    if (o.index1 != r.opened[i - 1].index1 + 1) return false;
                    if (!(r.opened[i - 1].key < o.key)) return false;
                }
            }
            Digest expect;
            if (lvl == 0) {
                if (r.parent_rec != 0xff) return false;
                if (r.commitment != root.root_commitment) return false;
                expect = root.root_hash;
            } else {
                if (r.parent_rec >= levels[lvl - 1].size()) return false;
                const auto& par = levels[lvl - 1][r.parent_rec];
                if (r.parent_slot >= par.opened.size()) return false;
                std::pair<int, int> ref{(int)r.parent_rec, (int)r.parent_slot};
                if (!(prev_ref < ref)) return false;
                prev_ref = ref;
                expect = par.opened[r.parent_slot].digest;
            }
            if (compute_node_hash(r.commitment, (NodeType)r.type, r.count) != expect) return false;
            BatchItem it;
            it.c = deserialize_g1(r.commitment);
            it.w = deserialize_g1(r.witness);
            for (const auto& o : r.opened)
                it.pts.push_back({salted_key(o.key, o.index1), value_scalar(o.digest)});
            items.push_back(std::move(it));
        }
    }
    return verify_batches(pp, items);
}

}  // namespace

bool verify_membership(const PublicParams& pp, const RootRecord& root, const Key& key,
                       const Digest& value_digest, const MembershipProof& proof) {
    try {
        const auto& Ls = proof.levels;
        if (Ls.empty()) return false;
        LevelVec lv;
        for (const auto& r : Ls) lv.push_back({r});
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            if (Ls[i].opened.size() != 1) return false;
            if (i > 0 && (Ls[i].parent_rec != 0 || Ls[i].parent_slot != 0)) return false;
        }
        if (!validate_chain(pp, root, lv)) return false;
        for (std::size_t i = 0; i + 1 < Ls.size(); ++i) {
            const auto& o = Ls[i].opened[0];
            // descent rule: separator >= key, or fall-through on the last child
            if (o.key < key && o.index1 != Ls[i].count) return false;
        }
        const auto& leaf = Ls.back().opened[0];
        return leaf.key == key && leaf.digest == value_digest;
    } catch (...) {
        return false;
    }
}

namespace {

struct Bracket {
    bool has_pred = false, has_succ = false;
    Key pred, succ;
};

bool verify_nm_core(const PublicParams& pp, const RootRecord& root, const Key& key,
                    const NonMembershipProof& proof, Bracket& out) {
    const LevelVec& L = proof.levels;
    if (proof.kind == BoundKind::empty_tree)
        return L.empty() && root.root_hash == empty_root_hash() && root.element_count == 0;
    if (L.empty()) return false;
    std::size_t depth = L.size();

    if (proof.kind == BoundKind::low || proof.kind == BoundKind::high ||
        proof.kind == BoundKind::case1) {
        if (proof.interval_level != depth - 1) return false;
        for (std::size_t i = 0; i < depth; ++i) {
            if (L[i].size() != 1) return false;
            if (i > 0 && (L[i][0].parent_rec != 0 || L[i][0].parent_slot != 0)) return false;
            std::size_t want = proof.kind == BoundKind::case1 && i == depth - 1 ? 2 : 1;
            if (L[i][0].opened.size() != want) return false;
        }
        if (!validate_chain(pp, root, L)) return false;
        if (proof.kind == BoundKind::low) {
            for (std::size_t i = 0; i < depth; ++i)
                if (L[i][0].opened[0].index1 != 1) return false;
            const auto& leaf = L.back()[0].opened[0];
            if (!(key < leaf.key)) return false;
            out.has_succ = true;
            out.succ = leaf.key;
            return true;
        }
        if (proof.kind == BoundKind::high) {
            const Key& pred = L.back()[0].opened[0].key;
            for (std::size_t i = 0; i < depth; ++i) {
                if (L[i][0].opened[0].index1 != L[i][0].count) return false;
                if (L[i][0].opened[0].key != pred) return false;
            }
            if (!(pred < key)) return false;
            out.has_pred = true;
            out.pred = pred;
            return true;
        }
        // case 1
        const auto& a = L.back()[0].opened[0];
        const auto& b = L.back()[0].opened[1];
        if (!(a.key < key && key < b.key)) return false;
        out = {true, true, a.key, b.key};
        return true;
    }

    if (proof.kind != BoundKind::case2) return false;
    std::size_t d = proof.interval_level;
    if (d + 1 >= depth) return false;
    for (std::size_t i = 0; i <= d; ++i) {
        if (L[i].size() != 1) return false;
        if (i > 0 && (L[i][0].parent_rec != 0 || L[i][0].parent_slot != 0)) return false;
        if (L[i][0].opened.size() != (i == d ? 2u : 1u)) return false;
    }
    for (std::size_t i = d + 1; i < depth; ++i) {
        if (L[i].size() != 2) return false;
        std::uint8_t wl = 0, wr = i == d + 1 ? 0 : 1;
        std::uint32_t sl = 0, sr = i == d + 1 ? 1 : 0;
        if (L[i][0].parent_rec != wl || L[i][0].parent_slot != sl) return false;
        if (L[i][1].parent_rec != wr || L[i][1].parent_slot != sr) return false;
        if (L[i][0].opened.size() != 1 || L[i][1].opened.size() != 1) return false;
    }
    if (!validate_chain(pp, root, L)) return false;
    const Key& pred = L.back()[0].opened[0].key;
    const Key& succ = L.back()[1].opened[0].key;
    if (!(pred < key && key < succ)) return false;
    if (L[d][0].opened[0].key != pred) return false;
    for (std::size_t i = d + 1; i < depth; ++i) {
        if (L[i][0].opened[0].index1 != L[i][0].count) return false;
        if (L[i][0].opened[0].key != pred) return false;
        if (L[i][1].opened[0].index1 != 1) return false;
    }
    out = {true, true, pred, succ};
    return true;
}

}  // namespace

bool verify_nonmembership(const PublicParams& pp, const RootRecord& root, const Key& key,
                          const NonMembershipProof& proof) {
    try {
        Bracket b;
        return verify_nm_core(pp, root, key, proof, b);
    } catch (...) {
        return false;
    }
}

namespace {

struct Desc {
    Digest hash;
    Key maxk;
};

// Splits a bit vector into runs (each run ends at a set bit). Returns run
// lengths; fails when the final bit is unset.
bool vector_runs(const std::vector<bool>& v, std::vector<std::size_t>& runs) {
    runs.clear();
    std::size_t len = 0;
    for (bool b : v) {
        ++len;
        if (b) {
            runs.push_back(len);
            len = 0;
        }
    }
    return len == 0;
}

Desc recommit_reconstructed(const PublicParams& pp, NodeType type,
                            std::span<const std::pair<Key, Digest>> elems) {
    std::vector<std::pair<Fr, Fr>> pts;
    pts.reserve(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i)
        pts.push_back({salted_key(elems[i].first, i + 1), value_scalar(elems[i].second)});
    Poly poly = interpolate(pts);
    Commitment c = commit(pp, poly);
    Desc d;
    d.hash = compute_node_hash(c.serialize(), type, elems.size());
    d.maxk = elems.back().first;
    return d;
}

}  // namespace


RangeVerifyResult verify_range(const PublicParams& pp, const RootRecord& root, const Key& lo,
                               const Key& hi, const RangeProof& proof) {
    RangeVerifyResult fail{};
    try {
        if (hi < lo) return fail;

        if (proof.right_kind == kEmptyRange) {
            if (!proof.interior.empty() || !proof.bit_vectors.empty()) return fail;
            if (proof.left_kind == (std::uint8_t)BoundKind::member) return fail;
            NonMembershipProof nm{(BoundKind)proof.left_kind, proof.aux_level, proof.levels};
            Bracket b;
            if (!verify_nm_core(pp, root, lo, nm, b)) return fail;
            if (b.has_succ && !(hi < b.succ)) return fail;
            return {true, {}};
        }

        if (proof.aux_level != 0) return fail;
        const LevelVec& L = proof.levels;
        if (L.empty()) return fail;
        const std::size_t depth = L.size();
        const std::size_t leaf_lvl = depth - 1;
        const auto& interior = proof.interior;
        const std::size_t m = interior.size();
        if (m == 0) return fail;
        for (std::size_t i = 0; i < m; ++i) {
            if (interior[i].first < lo || hi < interior[i].first) return fail;
            if (i > 0 && !(interior[i - 1].first < interior[i].first)) return fail;
        }
        if (proof.bit_vectors.size() != depth) return fail;
        if (proof.bit_vectors[leaf_lvl].size() != m) return fail;
        if (!validate_chain(pp, root, L)) return fail;

        const Key& s = interior.front().first;
        const Key& t = interior.back().first;

        // locate the boundary elements among the leaf records
        auto find_leaf = [&](const Key& k, std::size_t& rec, std::size_t& ord) {
            bool found = false;
            for (std::size_t ri = 0; ri < L[leaf_lvl].size(); ++ri)
                for (std::size_t oi = 0; oi < L[leaf_lvl][ri].opened.size(); ++oi)
                    if (L[leaf_lvl][ri].opened[oi].key == k) {
                        if (found) return false;
                        rec = ri;
                        ord = oi;
                        found = true;
                    }
            return found;
        };
        std::size_t s_rec = 0, s_ord = 0, t_rec = 0, t_ord = 0;
        if (!find_leaf(s, s_rec, s_ord) || !find_leaf(t, t_rec, t_ord)) return fail;

        // out-of-range openings at the leaf level must be exactly the anchors
        std::vector<std::pair<std::size_t, std::size_t>> lows, highs;
        for (std::size_t ri = 0; ri < L[leaf_lvl].size(); ++ri)
            for (std::size_t oi = 0; oi < L[leaf_lvl][ri].opened.size(); ++oi) {
                const Key& k = L[leaf_lvl][ri].opened[oi].key;
                if (k < lo) lows.push_back({ri, oi});
                if (hi < k) highs.push_back({ri, oi});
            }

        auto lk = (BoundKind)proof.left_kind;
        auto rk = (BoundKind)proof.right_kind;
        std::optional<std::size_t> pred_leaf_rec, succ_leaf_rec;
        switch (lk) {
            case BoundKind::member:
                if (!(s == lo) || !lows.empty()) return fail;
                break;
            case BoundKind::case1:
                if (lows.size() != 1 || lows[0].first != s_rec || lows[0].second + 1 != s_ord)
                    return fail;
                break;
            case BoundKind::case2: {
                if (lows.size() != 1 || lows[0].first == s_rec) return fail;
                pred_leaf_rec = lows[0].first;
                const auto& pr = L[leaf_lvl][*pred_leaf_rec];
                if (pr.opened.size() != 1 || pr.opened[0].index1 != pr.count) return fail;
                break;
            }
            case BoundKind::low:
                if (!lows.empty()) return fail;
                break;
            default:
                return fail;
        }
        switch (rk) {
            case BoundKind::member:
                if (!(t == hi) || !highs.empty()) return fail;
                break;
            case BoundKind::case1:
                if (highs.size() != 1 || highs[0].first != t_rec || highs[0].second != t_ord + 1)
                    return fail;
                break;
            case BoundKind::case2: {
                if (highs.size() != 1 || highs[0].first == t_rec) return fail;
                succ_leaf_rec = highs[0].first;
                const auto& sr = L[leaf_lvl][*succ_leaf_rec];
                if (sr.opened.size() != 1 || sr.opened[0].index1 != 1) return fail;
                break;
            }
            case BoundKind::high:
                if (!highs.empty()) return fail;
                break;
            default:
                return fail;
        }

        // parent chains (record index per level, leaf upward)
        auto chain_of = [&](std::size_t leaf_rec) {
            std::vector<std::size_t> ch(depth);
            ch[leaf_lvl] = leaf_rec;
            for (std::size_t lvl = leaf_lvl; lvl > 0; --lvl)
                ch[lvl - 1] = L[lvl][ch[lvl]].parent_rec;
            return ch;
        };
        std::vector<std::size_t> s_chain = chain_of(s_rec), t_chain = chain_of(t_rec);
        std::optional<std::vector<std::size_t>> pred_chain, succ_chain;
        if (pred_leaf_rec) pred_chain = chain_of(*pred_leaf_rec);
        if (succ_leaf_rec) succ_chain = chain_of(*succ_leaf_rec);

        // per-level: ordinal of the child-bearing slot within each chain record
        auto child_ord = [&](const std::vector<std::size_t>& ch, std::size_t lvl) -> std::size_t {
            // ordinal in record ch[lvl] from which ch[lvl+1] hangs
            return L[lvl + 1][ch[lvl + 1]].parent_slot;
        };

        // case-2 chains: strict checks below the divergence
        std::size_t pred_div = 0, succ_div = 0;
        if (pred_chain) {
            const Key& pred = L[leaf_lvl][*pred_leaf_rec].opened[0].key;
            std::size_t d = leaf_lvl;
            while (d > 0 && (*pred_chain)[d] != s_chain[d]) --d;
            if ((*pred_chain)[d] != s_chain[d] || d == leaf_lvl) return fail;
            pred_div = d;
            for (std::size_t lvl = d + 1; lvl < depth; ++lvl) {
                if ((*pred_chain)[lvl] == s_chain[lvl]) return fail;
                const auto& r = L[lvl][(*pred_chain)[lvl]];
                if (r.opened.size() != 1) return fail;
                if (r.opened[0].index1 != r.count) return fail;
                if (r.opened[0].key != pred) return fail;
            }
            // adjacency at the divergence node
            std::size_t po = child_ord(*pred_chain, pred_div);
            std::size_t so = child_ord(s_chain, pred_div);
            if (po + 1 != so) return fail;
            const auto& div = L[pred_div][s_chain[pred_div]];
            if (div.opened[po].key != pred) return fail;
        }
        if (succ_chain) {
            const Key& succ = L[leaf_lvl][*succ_leaf_rec].opened[0].key;
            std::size_t d = leaf_lvl;
            while (d > 0 && (*succ_chain)[d] != t_chain[d]) --d;
            if ((*succ_chain)[d] != t_chain[d] || d == leaf_lvl) return fail;
            succ_div = d;
            for (std::size_t lvl = d + 1; lvl < depth; ++lvl) {
                if ((*succ_chain)[lvl] == t_chain[lvl]) return fail;
                const auto& r = L[lvl][(*succ_chain)[lvl]];
                if (r.opened.size() != 1) return fail;
                if (r.opened[0].index1 != 1) return fail;
            }
            std::size_t so = child_ord(*succ_chain, succ_div);
            std::size_t to = child_ord(t_chain, succ_div);
            if (to + 1 != so) return fail;
            (void)succ;
        }

        // per level: every record must carry a role; spans must sit exactly
        // between the boundary slots
        std::vector<std::vector<std::size_t>> full_ords(depth);  // per level: s-record fulls
        std::vector<std::vector<std::size_t>> full_ords_t(depth);
        for (std::size_t lvl = 0; lvl < depth; ++lvl) {
            std::set<std::size_t> roles;
            roles.insert(s_chain[lvl]);
            roles.insert(t_chain[lvl]);
            if (pred_chain && lvl > pred_div) roles.insert((*pred_chain)[lvl]);
            if (succ_chain && lvl > succ_div) roles.insert((*succ_chain)[lvl]);
            if (roles.size() != L[lvl].size()) return fail;

            const auto& sR = L[lvl][s_chain[lvl]];
            bool merged = s_chain[lvl] == t_chain[lvl];

            // anchor ordinals inside the s/t records at this level
            std::set<std::size_t> anchors;
            if (pred_chain && lvl == pred_div) anchors.insert(child_ord(*pred_chain, lvl));
            if (succ_chain && lvl == succ_div) anchors.insert(child_ord(*succ_chain, lvl));
            if (lvl == leaf_lvl) {
                if (lk == BoundKind::case1) anchors.insert(s_ord - 1);
                if (rk == BoundKind::case1) anchors.insert(t_ord + 1);
            }

            std::size_t s_at = lvl == leaf_lvl ? s_ord : child_ord(s_chain, lvl);
            std::size_t t_at = lvl == leaf_lvl ? t_ord : child_ord(t_chain, lvl);

            if (lk == BoundKind::low && sR.opened[s_at].index1 != 1) return fail;
            if (rk == BoundKind::high) {
                const auto& tR = L[lvl][t_chain[lvl]];
                if (tR.opened[t_at].index1 != tR.count) return fail;
            }

            if (merged) {
                // every opened ordinal is either an adjacent anchor or lies
                // inside the span [s_at .. t_at]
                for (std::size_t oi = 0; oi < sR.opened.size(); ++oi) {
                    bool anchor = anchors.count(oi) > 0;
                    bool inside = oi >= s_at && oi <= t_at;
                    if (anchor == inside) return fail;
                }
                if (lvl < leaf_lvl)
                    for (std::size_t oi = s_at + 1; oi < t_at; ++oi) full_ords[lvl].push_back(oi);
            } else {
                const auto& tR = L[lvl][t_chain[lvl]];
                // s record: [s_at .. end], must reach the node's last element
                for (std::size_t oi = 0; oi < sR.opened.size(); ++oi) {
                    bool anchor = anchors.count(oi) > 0 && oi < s_at;
                    bool inside = oi >= s_at;
                    if (anchor == inside) return fail;
                }
                if (sR.opened.back().index1 != sR.count) return fail;
                // t record: [0 .. t_at] (+ trailing succ anchor)
                for (std::size_t oi = 0; oi < tR.opened.size(); ++oi) {
                    bool anchor = anchors.count(oi) > 0 && oi > t_at;
                    bool inside = oi <= t_at;
                    if (anchor == inside) return fail;
                }
                if (tR.opened[0].index1 != 1) return fail;
                if (lvl < leaf_lvl) {
                    for (std::size_t oi = s_at + 1; oi < sR.opened.size(); ++oi)
                        full_ords[lvl].push_back(oi);
                    for (std::size_t oi = 0; oi < t_at; ++oi) full_ords_t[lvl].push_back(oi);
                }
            }
        }

        // ----- bottom-up reconstruction of the middle stream -----
        std::vector<std::size_t> runs;
        if (!vector_runs(proof.bit_vectors[leaf_lvl], runs)) return fail;
        if (runs.empty()) return fail;

        const auto& sLeaf = L[leaf_lvl][s_rec];
        const auto& tLeaf = L[leaf_lvl][t_rec];
        auto leaf_inrange = [&](const LevelRecord& r) {
            std::vector<std::size_t> ords;
            for (std::size_t oi = 0; oi < r.opened.size(); ++oi) {
                const Key& k = r.opened[oi].key;
                if (!(k < lo) && !(hi < k)) ords.push_back(oi);
            }
            return ords;
        };
        std::vector<std::size_t> s_in = leaf_inrange(sLeaf);
        std::vector<std::size_t> t_in = leaf_inrange(tLeaf);

        std::size_t cursor = 0;  // interior position
        auto match_run = [&](const LevelRecord& r, const std::vector<std::size_t>& ords,
                             std::size_t run_len) {
            if (ords.size() != run_len) return false;
            for (std::size_t k = 0; k < run_len; ++k) {
                const auto& o = r.opened[ords[k]];
                if (!(o.key == interior[cursor + k].first)) return false;
                if (o.digest != interior[cursor + k].second) return false;
            }
            cursor += run_len;
            return true;
        };

        std::vector<Desc> stream;
        if (s_rec == t_rec) {
            if (runs.size() != 1) return fail;
            if (!match_run(sLeaf, s_in, runs[0])) return fail;
        } else {
            if (runs.size() < 2) return fail;
            if (!match_run(sLeaf, s_in, runs.front())) return fail;
            for (std::size_t rix = 1; rix + 1 < runs.size(); ++rix) {
                std::span<const std::pair<Key, Digest>> run(interior.data() + cursor, runs[rix]);
                stream.push_back(recommit_reconstructed(pp, NodeType::leaf, run));
                cursor += runs[rix];
            }
            if (!match_run(tLeaf, t_in, runs.back())) return fail;
        }
        if (cursor != m) return fail;

        for (std::size_t lvl = leaf_lvl; lvl-- > 0;) {
            const auto& vec = proof.bit_vectors[lvl];
            if (vec.size() != stream.size()) return fail;
            std::vector<std::size_t> lruns;
            if (!vector_runs(vec, lruns)) return fail;

            const auto& sR = L[lvl][s_chain[lvl]];
            const auto& tR = L[lvl][t_chain[lvl]];
            bool merged = s_chain[lvl] == t_chain[lvl];
            std::size_t c = merged ? 0 : full_ords_t[lvl].size();

            std::size_t sc = 0;  // stream cursor
            std::size_t run_at = 0;
            auto match_fulls = [&](const LevelRecord& r, const std::vector<std::size_t>& ords) {
                if (ords.empty()) return true;
                if (run_at >= lruns.size() || lruns[run_at] != ords.size()) return false;
                for (std::size_t k = 0; k < ords.size(); ++k) {
                    const auto& o = r.opened[ords[k]];
                    if (o.digest != stream[sc + k].hash) return false;
                    if (!(o.key == stream[sc + k].maxk)) return false;
                }
                sc += ords.size();
                ++run_at;
                return true;
            };

            std::vector<Desc> next;
            if (!match_fulls(sR, full_ords[lvl])) return fail;
            // middle containers: every run except the trailing t-run
            std::size_t tail_runs = c > 0 ? 1 : 0;
            while (run_at + tail_runs < lruns.size()) {
                if (lvl == 0) return fail;  // the root consumes everything directly
                std::size_t len = lruns[run_at];
                std::vector<std::pair<Key, Digest>> elems(len);
                for (std::size_t k = 0; k < len; ++k)
                    elems[k] = {stream[sc + k].maxk, stream[sc + k].hash};
                next.push_back(recommit_reconstructed(pp, NodeType::internal, elems));
                sc += len;
                ++run_at;
            }
            if (!merged && !match_fulls(tR, full_ords_t[lvl])) return fail;
            if (sc != stream.size() || run_at != lruns.size()) return fail;
            stream = std::move(next);
        }
        if (!stream.empty()) return fail;

        return {true, interior};
    } catch (...) {
        return fail;
    }
}

}  // namespace bmt
