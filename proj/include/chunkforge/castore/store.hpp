#ifndef CHUNKFORGE_CASTORE_STORE_HPP
#define CHUNKFORGE_CASTORE_STORE_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chunkforge/accelerant/pipeline.hpp"
#include "chunkforge/castore/blockmap.hpp"
#include "chunkforge/chunker.hpp"

namespace chunkforge::castore {

struct NodeAddress {
    std::string host;
    std::uint16_t port = 0;

    friend bool operator==(const NodeAddress& a, const NodeAddress& b) {
        return a.host == b.host && a.port == b.port;
    }
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TransferCounters {
    std::uint64_t blocks_put = 0;
    std::uint64_t data_bytes_put = 0;
    std::uint64_t blocks_fetched = 0;
    std::uint64_t data_bytes_fetched = 0;
};

// Storage-node surface. Implementations: in-memory and networked.
class BlockStore {
public:
    virtual ~BlockStore() = default;
    virtual void put_block(const Digest& digest,
                           hashcore::ByteView bytes) = 0;
    virtual std::vector<std::uint8_t> get_block(const Digest& digest) = 0;
    virtual bool has_block(const Digest& digest) = 0;
    virtual TransferCounters counters() const = 0;
};

// Metadata-manager surface.
class MetadataService {
public:
    static constexpr std::uint64_t kNoVersion = ~std::uint64_t{0};

    virtual ~MetadataService() = default;
    virtual std::optional<BlockMap> get_blockmap(const std::string& file_id) = 0;
    // Compare-and-set on the stored version; nullopt expects no existing map.
    virtual void put_blockmap(const BlockMap& map,
                              std::optional<std::uint64_t> expected_prev) = 0;
    virtual std::vector<NodeAddress> list_nodes() = 0;
    virtual void register_node(const NodeAddress& addr) = 0;
};

class MemoryBlockStore : public BlockStore {
public:
    explicit MemoryBlockStore(hashcore::SegmentedHashParams digest_params = {},
                              bool verify_puts = true,
                              std::uint64_t capacity_bytes = 0);

    void put_block(const Digest& digest, hashcore::ByteView bytes) override;
    std::vector<std::uint8_t> get_block(const Digest& digest) override;
    bool has_block(const Digest& digest) override;
    TransferCounters counters() const override;

    std::size_t block_count() const;
    // test hook: flip one byte of a stored block
    bool corrupt_block(const Digest& digest);

private:
    hashcore::SegmentedHashParams digest_params_;
    bool verify_;
    std::uint64_t capacity_;
    mutable std::mutex mu_;
    std::unordered_map<Digest, std::vector<std::uint8_t>, DigestHasher> blocks_;
    std::uint64_t stored_bytes_ = 0;
    TransferCounters counters_;
};

class MemoryMetadataService : public MetadataService {
public:
    std::optional<BlockMap> get_blockmap(const std::string& file_id) override;
    void put_blockmap(const BlockMap& map,
                      std::optional<std::uint64_t> expected_prev) override;
    std::vector<NodeAddress> list_nodes() override;
    void register_node(const NodeAddress& addr) override;

private:
    std::mutex mu_;
    std::unordered_map<std::string, BlockMap> maps_;
    std::vector<NodeAddress> nodes_;
};

// Hashing strategy behind a write session: inline CPU, the accelerant
// pipeline, or cheap locator ids for the non-content-addressable mode.
class HashEngine {
public:
    virtual ~HashEngine() = default;
    virtual std::vector<accelerant::WindowHit>
    window_scan(hashcore::ByteView data,
                const hashcore::WindowHashParams& params) = 0;
    virtual std::vector<Digest>
    block_digests(hashcore::ByteView data,
                  std::span<const accelerant::ByteRange> ranges,
                  const hashcore::SegmentedHashParams& params) = 0;
};

class InlineHashEngine : public HashEngine {
public:
    explicit InlineHashEngine(unsigned workers = 1) : workers_(workers) {}
    std::vector<accelerant::WindowHit>
    window_scan(hashcore::ByteView data,
                const hashcore::WindowHashParams& params) override;
    std::vector<Digest>
    block_digests(hashcore::ByteView data,
                  std::span<const accelerant::ByteRange> ranges,
                  const hashcore::SegmentedHashParams& params) override;

private:
    unsigned workers_;
};

class PipelineHashEngine : public HashEngine {
public:
    explicit PipelineHashEngine(accelerant::Pipeline& pipeline)
        : pipeline_(pipeline) {}
    std::vector<accelerant::WindowHit>
    window_scan(hashcore::ByteView data,
                const hashcore::WindowHashParams& params) override;
    std::vector<Digest>
    block_digests(hashcore::ByteView data,
                  std::span<const accelerant::ByteRange> ranges,
                  const hashcore::SegmentedHashParams& params) override;

private:
    accelerant::Ticket submit(accelerant::TaskSpec spec,
                              hashcore::ByteView data);
    accelerant::Pipeline& pipeline_;
};

// Unique non-content digests for the non-CA configuration: no data is read,
// every block is "new".
class LocatorHashEngine : public HashEngine {
public:
    std::vector<accelerant::WindowHit>
    window_scan(hashcore::ByteView, const hashcore::WindowHashParams&) override {
        throw std::logic_error("non-CA mode has no window hashing");
    }
    std::vector<Digest>
    block_digests(hashcore::ByteView,
                  std::span<const accelerant::ByteRange> ranges,
                  const hashcore::SegmentedHashParams&) override;

private:
    std::atomic<std::uint64_t> counter_{1};
};

struct SimilarityReport {
    std::uint64_t total_blocks = 0;
    std::uint64_t matched_blocks = 0;
    std::uint64_t new_bytes = 0;
    std::uint64_t matched_bytes = 0;

    std::uint64_t total_bytes() const { return new_bytes + matched_bytes; }
    double similarity_ratio() const {
        const auto t = total_bytes();
        return t == 0 ? 0.0 : static_cast<double>(matched_bytes) / t;
    }
};

SimilarityReport similarity(const BlockMap& previous,
                            std::span<const Chunk> chunks);

struct StoreConfig {
    unsigned stripe_width = 4;
    std::size_t write_buffer_bytes = 4 * 1024 * 1024;
    hashcore::SegmentedHashParams digest_params;
    bool verify_reads = true;
};

struct CommitResult {
    BlockMap map;
    SimilarityReport report;
    std::uint64_t uploaded_bytes = 0;
    std::vector<std::uint64_t> per_node_bytes;
};

class Store;

// Buffers written data, chunks it under the policy (hashing via the engine),
// diffs against the previous version and uploads new blocks at commit.
// Single writer per file id.
class WriteSession {
public:
    ~WriteSession();
    WriteSession(WriteSession&&) = delete;

    void write(hashcore::ByteView data);
    CommitResult commit();
    void abort();

    const std::string& file_id() const { return file_id_; }
    std::uint64_t bytes_written() const { return stream_len_; }

private:
    friend class Store;
    WriteSession(Store& store, std::string file_id, ChunkingPolicy policy,
                 HashEngine& engine, std::optional<BlockMap> previous);

    void flush(bool final);

    Store& store_;
    std::string file_id_;
    ChunkingPolicy policy_;
    HashEngine& engine_;
    std::optional<BlockMap> previous_;
    std::unordered_set<Digest, DigestHasher> previous_digests_;

    std::vector<std::uint8_t> pending_; // bytes [chunk_start_, stream_len_)
    std::uint64_t chunk_start_ = 0;
    std::uint64_t next_window_ = 0;
    std::uint64_t stream_len_ = 0;
    std::uint64_t buffered_since_flush_ = 0;

    std::vector<Chunk> chunks_;
    // stream-ordered payloads of unmatched chunks, by chunk index
    std::vector<std::pair<std::size_t, std::vector<std::uint8_t>>> new_blocks_;
    bool failed_ = false;
    bool done_ = false;
    bool released_ = false;
};

class Store {
public:
    Store(MetadataService& meta,
          std::vector<std::shared_ptr<BlockStore>> nodes, StoreConfig cfg);

    std::unique_ptr<WriteSession> begin_write(const std::string& file_id,
                                              ChunkingPolicy policy,
                                              HashEngine& engine);
    std::vector<std::uint8_t> read(const std::string& file_id);

    const StoreConfig& config() const { return cfg_; }
    std::uint64_t total_uploaded_bytes() const;

private:
    friend class WriteSession;

    CommitResult finish_commit(WriteSession& session);
    void release_writer(const std::string& file_id);

    MetadataService& meta_;
    std::vector<std::shared_ptr<BlockStore>> nodes_;
    StoreConfig cfg_;

    mutable std::mutex mu_;
    std::unordered_set<std::string> active_writers_;
    std::uint64_t total_uploaded_ = 0;
};

} // namespace chunkforge::castore

#endif
