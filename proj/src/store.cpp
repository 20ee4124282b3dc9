#include "bmt/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

namespace bmt {

namespace {

constexpr std::uint32_t kPageMagic = 0x4e544d42;  // "BMTN"
constexpr char kPagesHeader[12] = {'B', 'M', 'T', 'P', 'A', 'G', 'E', 'S', 1, 0, 0, 0};
constexpr char kValuesHeader[12] = {'B', 'M', 'T', 'V', 'A', 'L', 'U', 'E', 1, 0, 0, 0};
constexpr char kRootsHeader[12] = {'B', 'M', 'T', 'R', 'O', 'O', 'T', 'S', 1, 0, 0, 0};
constexpr std::size_t kRootRecordSize = RootRecord::kSerializedSize + 8;  // + root node id

void write_all(int fd, const void* data, std::size_t n) {
    const char* p = (const char*)data;
    while (n) {
        ssize_t w = ::write(fd, p, n);
        if (w <= 0) throw std::runtime_error("store: write failed");
        p += w;
        n -= (std::size_t)w;
    }
}

void read_at(int fd, std::uint64_t off, void* data, std::size_t n) {
    char* p = (char*)data;
    while (n) {
        ssize_t r = ::pread(fd, p, n, (off_t)off);
        if (r <= 0) throw std::runtime_error("store: read failed");
        p += r;
        off += (std::uint64_t)r;
        n -= (std::size_t)r;
    }
}

void sync_fd(int fd) {
    if (::fsync(fd) != 0) throw std::runtime_error("store: fsync failed");
}

std::uint64_t file_size(int fd) {
    struct stat st{};
    if (::fstat(fd, &st) != 0) throw std::runtime_error("store: fstat failed");
    return (std::uint64_t)st.st_size;
}

void put_u16(Bytes& b, std::uint16_t v) {
    b.push_back((std::uint8_t)(v & 0xff));
    b.push_back((std::uint8_t)(v >> 8));
}
void put_u32(Bytes& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((std::uint8_t)(v >> (8 * i)));
}
void put_u64(Bytes& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back((std::uint8_t)(v >> (8 * i)));
}

struct Cursor {
    const std::uint8_t* p;
    std::size_t n, at = 0;
    void need(std::size_t k) const {
        if (at + k > n) throw std::runtime_error("store: page truncated");
    }
    std::uint8_t u8() {
        need(1);
        return p[at++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = (std::uint16_t)(p[at] | (p[at + 1] << 8));
        at += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= (std::uint32_t)p[at + i] << (8 * i);
        at += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= (std::uint64_t)p[at + i] << (8 * i);
        at += 8;
        return v;
    }
    void raw(void* out, std::size_t k) {
        need(k);
        std::memcpy(out, p + at, k);
        at += k;
    }
};

Bytes encode_node(const TreeNode& n) {
    Bytes b;
    b.push_back(n.leaf ? 1 : 0);
    b.push_back(n.hash_type);
    put_u16(b, (std::uint16_t)n.count());
    if (n.leaf) {
        for (const auto& e : n.elems) {
            put_u16(b, (std::uint16_t)e.key.size());
            b.insert(b.end(), e.key.begin(), e.key.end());
            b.insert(b.end(), e.vdigest.begin(), e.vdigest.end());
            put_u64(b, e.voff);
            put_u32(b, e.vlen);
        }
    } else {
        for (const auto& e : n.inner) {
            put_u16(b, (std::uint16_t)e.key.size());
            b.insert(b.end(), e.key.begin(), e.key.end());
            put_u64(b, e.child);
        }
    }
    b.insert(b.end(), n.commitment.begin(), n.commitment.end());
    b.insert(b.end(), n.node_hash.begin(), n.node_hash.end());
    return b;
}

TreeNode decode_node(const std::uint8_t* data, std::size_t len) {
    Cursor c{data, len};
    TreeNode n;
    n.leaf = c.u8() != 0;
    n.hash_type = c.u8();
    std::size_t cnt = c.u16();
    if (n.leaf) {
        n.elems.resize(cnt);
        for (auto& e : n.elems) {
            std::size_t kl = c.u16();
            if (kl > kMaxKeyLen) throw std::runtime_error("store: bad key length");
            e.key.resize(kl);
            c.raw(e.key.data(), kl);
            c.raw(e.vdigest.data(), 32);
            e.voff = c.u64();
            e.vlen = c.u32();
        }
    } else {
        n.inner.resize(cnt);
        for (auto& e : n.inner) {
            std::size_t kl = c.u16();
            if (kl > kMaxKeyLen) throw std::runtime_error("store: bad key length");
            e.key.resize(kl);
            c.raw(e.key.data(), kl);
            e.child = c.u64();
        }
    }
    c.raw(n.commitment.data(), 48);
    c.raw(n.node_hash.data(), 32);
    if (c.at != len) throw std::runtime_error("store: page has trailing bytes");
    // integrity: the stored hash must match its own preimage
    Digest want = n.count() == 0 ? empty_root_hash()
                                 : compute_node_hash(n.commitment, (NodeType)n.hash_type, n.count());
    if (want != n.node_hash) throw std::runtime_error("store: node hash check failed on load");
    return n;
}

}  // namespace

FileStore::~FileStore() {
    if (pages_fd_ >= 0) ::close(pages_fd_);
    if (values_fd_ >= 0) ::close(values_fd_);
    if (roots_fd_ >= 0) ::close(roots_fd_);
}

FileStore::FileStore(FileStore&& o) noexcept
    : dir_(std::move(o.dir_)),
      q_(o.q_),
      pages_fd_(o.pages_fd_),
      values_fd_(o.values_fd_),
      roots_fd_(o.roots_fd_),
      pages_end_(o.pages_end_),
      values_end_(o.values_end_),
      next_id_(o.next_id_),
      page_index_(std::move(o.page_index_)),
      page_len_(std::move(o.page_len_)),
      roots_(std::move(o.roots_)),
      pending_pages_(std::move(o.pending_pages_)),
      pending_values_(std::move(o.pending_values_)),
      cache_(std::move(o.cache_)) {
    o.pages_fd_ = o.values_fd_ = o.roots_fd_ = -1;
}

void FileStore::open_files(const std::string& dir, bool create) {
    dir_ = dir;
    int flags = O_RDWR | O_APPEND | (create ? O_CREAT | O_EXCL : 0);
    auto open1 = [&](const std::string& name) {
        int fd = ::open((dir + "/" + name).c_str(), flags, 0644);
        if (fd < 0) throw std::runtime_error("store: cannot open " + dir + "/" + name);
        return fd;
    };
    pages_fd_ = open1("pages.bin");
    values_fd_ = open1("values.bin");
    roots_fd_ = open1("roots.bin");
}

FileStore FileStore::create(const std::string& dir, std::uint32_t q) {
    validate_branching(q);
    ::mkdir(dir.c_str(), 0755);
    FileStore s;
    s.open_files(dir, true);
    s.q_ = q;
    write_all(s.pages_fd_, kPagesHeader, sizeof kPagesHeader);
    write_all(s.values_fd_, kValuesHeader, sizeof kValuesHeader);
    Bytes rh(kRootsHeader, kRootsHeader + sizeof kRootsHeader);
    put_u32(rh, q);
    write_all(s.roots_fd_, rh.data(), rh.size());
    s.pages_end_ = sizeof kPagesHeader;
    s.values_end_ = sizeof kValuesHeader;

    // genesis: one empty root leaf plus the genesis record
    TreeNode empty;
    empty.commitment = serialize_g1(G1Affine::identity());
    empty.node_hash = empty_root_hash();
    empty.hash_type = 0;
    NodeId id = s.alloc_id();
    s.put(id, std::move(empty));
    s.publish(genesis_record(), id);
    return s;
}

FileStore FileStore::open(const std::string& dir) {
    FileStore s;
    s.open_files(dir, false);
    char hdr[12];
    read_at(s.pages_fd_, 0, hdr, 12);
    if (std::memcmp(hdr, kPagesHeader, 12) != 0) throw std::runtime_error("store: bad pages header");
    read_at(s.values_fd_, 0, hdr, 12);
    if (std::memcmp(hdr, kValuesHeader, 12) != 0)
        throw std::runtime_error("store: bad values header");
    char rhdr[16];
    read_at(s.roots_fd_, 0, rhdr, 16);
    if (std::memcmp(rhdr, kRootsHeader, 12) != 0)
        throw std::runtime_error("store: bad roots header");
    s.q_ = 0;
    for (int i = 0; i < 4; ++i) s.q_ |= (std::uint32_t)(std::uint8_t)rhdr[12 + i] << (8 * i);
    validate_branching(s.q_);
    s.values_end_ = file_size(s.values_fd_);
    s.scan_pages();
    s.load_roots();
    if (s.roots_.empty()) throw std::runtime_error("store: no published roots");
    // drop torn tails left by a crash so later appends stay aligned
    if (::ftruncate(s.pages_fd_, (off_t)s.pages_end_) != 0)
        throw std::runtime_error("store: cannot truncate pages tail");
    std::uint64_t roots_valid = 16 + s.roots_.size() * kRootRecordSize;
    if (::ftruncate(s.roots_fd_, (off_t)roots_valid) != 0)
        throw std::runtime_error("store: cannot truncate roots tail");
    return s;
}

void FileStore::scan_pages() {
    std::uint64_t end = file_size(pages_fd_);
    std::uint64_t at = sizeof kPagesHeader;
    next_id_ = 1;
    while (at + 16 <= end) {
        std::uint8_t hdr[16];
        read_at(pages_fd_, at, hdr, 16);
        std::uint32_t magic = 0, len = 0;
        std::uint64_t id = 0;
        for (int i = 0; i < 4; ++i) magic |= (std::uint32_t)hdr[i] << (8 * i);
        for (int i = 0; i < 4; ++i) len |= (std::uint32_t)hdr[4 + i] << (8 * i);
        for (int i = 0; i < 8; ++i) id |= (std::uint64_t)hdr[8 + i] << (8 * i);
        if (magic != kPageMagic || at + 16 + len > end) break;  // torn tail
        page_index_[id] = at + 16;
        // stash length in the high bits? keep a side map instead
        page_len_[id] = len;
        if (id >= next_id_) next_id_ = id + 1;
        at += 16 + len;
    }
    pages_end_ = at;
}

void FileStore::load_roots() {
    std::uint64_t end = file_size(roots_fd_);
    std::uint64_t at = 16;
    while (at + kRootRecordSize <= end) {
        std::uint8_t buf[kRootRecordSize];
        read_at(roots_fd_, at, buf, kRootRecordSize);
        RootRecord rec = RootRecord::deserialize({buf, RootRecord::kSerializedSize});
        NodeId id = 0;
        for (int i = 0; i < 8; ++i)
            id |= (std::uint64_t)buf[RootRecord::kSerializedSize + i] << (8 * i);
        roots_.push_back({rec, id});
        at += kRootRecordSize;
    }
    // ignore any torn trailing record
}

NodeId FileStore::alloc_id() { return next_id_++; }

void FileStore::put(NodeId id, TreeNode node) {
    pending_pages_[id] = std::make_shared<const TreeNode>(std::move(node));
}

std::shared_ptr<const TreeNode> FileStore::get(NodeId id) const {
    auto p = pending_pages_.find(id);
    if (p != pending_pages_.end()) return p->second;
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto c = cache_.find(id);
        if (c != cache_.end()) return c->second;
    }
    auto it = page_index_.find(id);
    if (it == page_index_.end()) throw std::runtime_error("store: unknown node id");
    std::uint32_t len = page_len_.at(id);
    Bytes buf(len);
    read_at(pages_fd_, it->second, buf.data(), len);
    auto node = std::make_shared<const TreeNode>(decode_node(buf.data(), len));
    std::lock_guard<std::mutex> lk(cache_mu_);
    cache_[id] = node;
    return node;
}

ValueLogEntry FileStore::put_value(std::span<const std::uint8_t> bytes) {
    ValueLogEntry e;
    e.offset = values_end_ + pending_values_.size();
    e.length = (std::uint32_t)bytes.size();
    e.digest = sha256(bytes);
    pending_values_.insert(pending_values_.end(), bytes.begin(), bytes.end());
    return e;
}

Bytes FileStore::get_value(const ValueLogEntry& e) const {
    if (e.offset >= values_end_ + pending_values_.size()) throw std::runtime_error("store: value offset out of range");
    Bytes out(e.length);
    if (e.offset >= values_end_) {
        std::size_t at = (std::size_t)(e.offset - values_end_);
        if (at + e.length > pending_values_.size())
            throw std::runtime_error("store: value out of range");
        std::memcpy(out.data(), pending_values_.data() + at, e.length);
    } else {
        read_at(values_fd_, e.offset, out.data(), e.length);
    }
    if (sha256(out) != e.digest) throw std::runtime_error("store: value digest mismatch");
    return out;
}

void FileStore::publish(const RootRecord& rec, NodeId root_id) {
    if (!pending_values_.empty()) {
        write_all(values_fd_, pending_values_.data(), pending_values_.size());
        values_end_ += pending_values_.size();
        pending_values_.clear();
        sync_fd(values_fd_);
    }
    if (!pending_pages_.empty()) {
        Bytes chunk;
        for (const auto& [id, node] : pending_pages_) {
            Bytes payload = encode_node(*node);
            put_u32(chunk, kPageMagic);
            put_u32(chunk, (std::uint32_t)payload.size());
            put_u64(chunk, id);
            page_index_[id] = pages_end_ + chunk.size();
            page_len_[id] = (std::uint32_t)payload.size();
            chunk.insert(chunk.end(), payload.begin(), payload.end());
            {
                std::lock_guard<std::mutex> lk(cache_mu_);
                cache_[id] = node;
            }
        }
        write_all(pages_fd_, chunk.data(), chunk.size());
        pages_end_ += chunk.size();
        pending_pages_.clear();
        sync_fd(pages_fd_);
    }
    Bytes out;
    auto ser = rec.serialize();
    out.insert(out.end(), ser.begin(), ser.end());
    put_u64(out, root_id);
    write_all(roots_fd_, out.data(), out.size());
    sync_fd(roots_fd_);
    roots_.push_back({rec, root_id});
}

std::pair<RootRecord, NodeId> FileStore::current() const {
    if (roots_.empty()) throw std::runtime_error("store: no roots");
    return roots_.back();
}

std::optional<std::pair<RootRecord, NodeId>> FileStore::find_root(const Digest& root_hash) const {
    for (auto it = roots_.rbegin(); it != roots_.rend(); ++it)
        if (it->first.root_hash == root_hash) return *it;
    return std::nullopt;
}

}  // namespace bmt
