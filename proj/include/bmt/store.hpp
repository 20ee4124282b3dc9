#pragma once

#include <mutex>
#include <optional>
#include <string>

#include "bmt/authtree.hpp"

namespace bmt {

struct ValueLogEntry {
    std::uint64_t offset = 0;
    std::uint32_t length = 0;
    Digest digest{};
};

// Durable copy-on-write store: three files under one directory.
//   pages.bin  - append-only node pages
//   values.bin - append-only raw value log
//   roots.bin  - append-only fixed-width root records (the publication point)
//
// Mutations buffer in memory; publish() makes values and pages durable first
// and appends the root record last, so a half-written batch never becomes
// visible. Old versions stay readable forever (no compaction).
class FileStore : public NodeStore {
public:
    static FileStore create(const std::string& dir, std::uint32_t q);
    static FileStore open(const std::string& dir);
    ~FileStore() override;

    FileStore(FileStore&&) noexcept;
    FileStore& operator=(FileStore&&) = delete;
    FileStore(const FileStore&) = delete;

    NodeId alloc_id() override;
    void put(NodeId id, TreeNode node) override;
    std::shared_ptr<const TreeNode> get(NodeId id) const override;

    ValueLogEntry put_value(std::span<const std::uint8_t> bytes);
    Bytes get_value(const ValueLogEntry& e) const;

    void publish(const RootRecord& rec, NodeId root_id);

    std::uint32_t q() const { return q_; }
    std::pair<RootRecord, NodeId> current() const;
    std::optional<std::pair<RootRecord, NodeId>> find_root(const Digest& root_hash) const;
    const std::vector<std::pair<RootRecord, NodeId>>& roots() const { return roots_; }

private:
    FileStore() = default;
    void open_files(const std::string& dir, bool create);
    void scan_pages();
    void load_roots();

    std::string dir_;
    std::uint32_t q_ = 0;
    int pages_fd_ = -1, values_fd_ = -1, roots_fd_ = -1;
    std::uint64_t pages_end_ = 0, values_end_ = 0;
    NodeId next_id_ = 1;

    std::unordered_map<NodeId, std::uint64_t> page_index_;  // id -> payload offset
    std::unordered_map<NodeId, std::uint32_t> page_len_;
    std::vector<std::pair<RootRecord, NodeId>> roots_;

    // pending (unpublished) state
    std::unordered_map<NodeId, std::shared_ptr<const TreeNode>> pending_pages_;
    Bytes pending_values_;

    mutable std::mutex cache_mu_;  // published snapshots are read concurrently
    mutable std::unordered_map<NodeId, std::shared_ptr<const TreeNode>> cache_;
};

}  // namespace bmt
