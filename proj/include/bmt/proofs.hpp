#pragma once

#include "bmt/authtree.hpp"

namespace bmt {

// Authenticated query proofs. A proof is a per-level list of node records;
// each record batch-opens one node of the audit structure with a single
// constant-size witness. The verifier rebuilds every node hash bottom-up and
// never touches the store.

enum class ProofType : std::uint8_t { membership = 1, nonmembership = 2, range = 3 };

// Shape of a non-membership argument (also used for range boundaries):
//   member   - boundary key itself is present (range proofs only)
//   case1    - both bracketing neighbours sit in one leaf
//   case2    - bracketing neighbours straddle a leaf boundary; the proof
//              splits below their deepest common ancestor
//   low      - queried key precedes the whole tree (leftmost path, index 1)
//   high     - queried key follows the whole tree (rightmost path, index = count)
//   empty_tree - the tree holds nothing at all
enum class BoundKind : std::uint8_t {
    member = 0,
    case1 = 1,
    case2 = 2,
    low = 3,
    high = 4,
    empty_tree = 5,
};

struct OpenedElem {
    Key key;
    std::uint32_t index1 = 0;  // 1-based sorted position inside the node
    Digest digest{};           // child node hash (internal) or value digest (leaf)
};

struct LevelRecord {
    std::uint8_t parent_rec = 0xff;   // record index at the previous level
    std::uint32_t parent_slot = 0;    // ordinal into the parent's opened list
    std::uint8_t type = 0;            // hashed type byte
    std::uint32_t count = 0;          // node element count (hashed)
    std::array<std::uint8_t, 48> commitment{};
    std::vector<OpenedElem> opened;
    std::array<std::uint8_t, 48> witness{};
};

using LevelVec = std::vector<std::vector<LevelRecord>>;

struct MembershipProof {
    std::vector<LevelRecord> levels;  // root to leaf, one record each
};

struct NonMembershipProof {
    BoundKind kind = BoundKind::empty_tree;
    std::uint32_t interval_level = 0;  // depth of the node opening two elements
    LevelVec levels;
};

struct RangeProof {
    // left_kind: how the lower boundary is attested; right_kind likewise, or
    // kEmptyRange when the whole query interval is empty and `levels` holds a
    // non-membership structure for lo.
    std::uint8_t left_kind = 0;
    std::uint8_t right_kind = 0;
    std::uint32_t aux_level = 0;  // interval level of an embedded non-membership
    LevelVec levels;
    // bit_vectors[j]: one bit per in-range object at level j+1 (leaf elements
    // for j = h, fully-in-range nodes otherwise), set on the last object of
    // its level-j container; lets the verifier re-partition the flat interior.
    std::vector<std::vector<bool>> bit_vectors;
    std::vector<std::pair<Key, Digest>> interior;
};

inline constexpr std::uint8_t kEmptyRange = 0xff;

MembershipProof prove_membership(const AuthTree& tree, const Key& key);

bool verify_membership(const PublicParams& pp, const RootRecord& root, const Key& key,
                       const Digest& value_digest, const MembershipProof& proof);

NonMembershipProof prove_nonmembership(const AuthTree& tree, const Key& key);

bool verify_nonmembership(const PublicParams& pp, const RootRecord& root, const Key& key,
                          const NonMembershipProof& proof);

RangeProof prove_range(const AuthTree& tree, const Key& lo, const Key& hi);

struct RangeVerifyResult {
    bool ok = false;
    std::vector<std::pair<Key, Digest>> interior;
};

RangeVerifyResult verify_range(const PublicParams& pp, const RootRecord& root, const Key& lo,
                               const Key& hi, const RangeProof& proof);

Bytes serialize_proof(const MembershipProof& p);
Bytes serialize_proof(const NonMembershipProof& p);
Bytes serialize_proof(const RangeProof& p);

MembershipProof parse_membership(std::span<const std::uint8_t> in);
NonMembershipProof parse_nonmembership(std::span<const std::uint8_t> in);
RangeProof parse_range(std::span<const std::uint8_t> in);

ProofType peek_proof_type(std::span<const std::uint8_t> in);

template <class P>
std::size_t proof_size(const P& p) {
    return serialize_proof(p).size();
}

// Total bits across all range-proof bit vectors (the documented accounting:
// m bits at the leaf level plus one bit per fully-in-range node per level).
std::size_t range_bit_count(const RangeProof& p);

}  // namespace bmt
