#include "chunkforge/castore/store.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <thread>

namespace chunkforge::castore {

// --- MemoryBlockStore ---

MemoryBlockStore::MemoryBlockStore(hashcore::SegmentedHashParams digest_params,
                                   bool verify_puts,
                                   std::uint64_t capacity_bytes)
    : digest_params_(digest_params),
      verify_(verify_puts),
      capacity_(capacity_bytes) {}

void MemoryBlockStore::put_block(const Digest& digest,
                                 hashcore::ByteView bytes) {
    if (verify_ &&
        hashcore::direct_hash(bytes, digest_params_) != digest)
        throw IntegrityError("put_block digest does not match data");

    std::lock_guard lock(mu_);
    counters_.blocks_put++;
    counters_.data_bytes_put += bytes.size();
    if (blocks_.contains(digest)) return; // idempotent, no rewrite
    if (capacity_ != 0 && stored_bytes_ + bytes.size() > capacity_)
        throw CapacityError("storage node is full");
    blocks_.emplace(digest,
                    std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    stored_bytes_ += bytes.size();
}

std::vector<std::uint8_t> MemoryBlockStore::get_block(const Digest& digest) {
    std::lock_guard lock(mu_);
    auto it = blocks_.find(digest);
    if (it == blocks_.end()) throw NotFoundError("unknown block digest");
    counters_.blocks_fetched++;
    counters_.data_bytes_fetched += it->second.size();
    return it->second;
}

bool MemoryBlockStore::has_block(const Digest& digest) {
    std::lock_guard lock(mu_);
    return blocks_.contains(digest);
}

TransferCounters MemoryBlockStore::counters() const {
    std::lock_guard lock(mu_);
    return counters_;
}

std::size_t MemoryBlockStore::block_count() const {
    std::lock_guard lock(mu_);
    return blocks_.size();
}

bool MemoryBlockStore::corrupt_block(const Digest& digest) {
    std::lock_guard lock(mu_);
    auto it = blocks_.find(digest);
    if (it == blocks_.end() || it->second.empty()) return false;
    it->second[it->second.size() / 2] ^= 0xff;
    return true;
}

// --- MemoryMetadataService ---

std::optional<BlockMap>
MemoryMetadataService::get_blockmap(const std::string& file_id) {
    std::lock_guard lock(mu_);
    auto it = maps_.find(file_id);
    if (it == maps_.end()) return std::nullopt;
    return it->second;
}

void MemoryMetadataService::put_blockmap(
    const BlockMap& map, std::optional<std::uint64_t> expected_prev) {
    std::lock_guard lock(mu_);
    auto it = maps_.find(map.file_id);
    if (expected_prev.has_value()) {
        if (it == maps_.end() || it->second.version != *expected_prev)
            throw ConflictError("block-map version mismatch");
    } else if (it != maps_.end()) {
        throw ConflictError("block-map already exists");
    }
    maps_[map.file_id] = map;
}

std::vector<NodeAddress> MemoryMetadataService::list_nodes() {
    std::lock_guard lock(mu_);
    return nodes_;
}

void MemoryMetadataService::register_node(const NodeAddress& addr) {
    std::lock_guard lock(mu_);
    if (std::find(nodes_.begin(), nodes_.end(), addr) == nodes_.end())
        nodes_.push_back(addr);
}

// --- hash engines ---

std::vector<accelerant::WindowHit>
InlineHashEngine::window_scan(hashcore::ByteView data,
                              const hashcore::WindowHashParams& params) {
    auto hashes = hashcore::window_hashes(data, params, workers_);
    std::vector<accelerant::WindowHit> hits;
    hits.reserve(hashes.size());
    for (auto& h : hashes)
        hits.push_back({h.offset, h.digest, hashcore::is_boundary(h.digest, params)});
    return hits;
}

std::vector<Digest>
InlineHashEngine::block_digests(hashcore::ByteView data,
                                std::span<const accelerant::ByteRange> ranges,
                                const hashcore::SegmentedHashParams& params) {
    std::vector<Digest> out;
    out.reserve(ranges.size());
    for (const auto& r : ranges)
        out.push_back(hashcore::direct_hash(data.subspan(r.offset, r.length),
                                            params, workers_));
    return out;
}

accelerant::Ticket PipelineHashEngine::submit(accelerant::TaskSpec spec,
                                              hashcore::ByteView data) {
    auto buf = pipeline_.acquire(data.size());
    std::memcpy(buf.data(), data.data(), data.size());
    buf.set_used(data.size());
    spec.input = std::move(buf);
    return pipeline_.submit(std::move(spec));
}

std::vector<accelerant::WindowHit>
PipelineHashEngine::window_scan(hashcore::ByteView data,
                                const hashcore::WindowHashParams& params) {
    accelerant::TaskSpec spec;
    spec.kind = accelerant::TaskKind::window_hash_batch;
    spec.window = params;
    auto ticket = submit(std::move(spec), data);
    const auto& result = ticket.wait();
    if (result.failed) throw TransportError("window hash task failed: " + result.error);
    return result.windows;
}

std::vector<Digest>
PipelineHashEngine::block_digests(hashcore::ByteView data,
                                  std::span<const accelerant::ByteRange> ranges,
                                  const hashcore::SegmentedHashParams& params) {
    accelerant::TaskSpec spec;
    spec.kind = accelerant::TaskKind::direct_hash_batch;
    spec.segmented = params;
    spec.ranges.assign(ranges.begin(), ranges.end());
    auto ticket = submit(std::move(spec), data);
    const auto& result = ticket.wait();
    if (result.failed) throw TransportError("direct hash task failed: " + result.error);
    return result.digests;
}

std::vector<Digest> LocatorHashEngine::block_digests(
    hashcore::ByteView, std::span<const accelerant::ByteRange> ranges,
    const hashcore::SegmentedHashParams&) {
    static const std::uint64_t engine_salt = [] {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }();
    std::vector<Digest> out;
    out.reserve(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const std::uint64_t c = counter_.fetch_add(1);
        Digest d;
        d.len = 16;
        std::memcpy(d.bytes.data(), &engine_salt, 8);
        std::memcpy(d.bytes.data() + 8, &c, 8);
        out.push_back(d);
    }
    return out;
}

// --- similarity ---

SimilarityReport similarity(const BlockMap& previous,
                            std::span<const Chunk> chunks) {
    std::unordered_set<Digest, DigestHasher> prev;
    prev.reserve(previous.blocks.size());
    for (const auto& b : previous.blocks) prev.insert(b.digest);

    SimilarityReport rep;
    rep.total_blocks = chunks.size();
    for (const auto& c : chunks) {
        if (prev.contains(c.digest)) {
            rep.matched_blocks++;
            rep.matched_bytes += c.length;
        } else {
            rep.new_bytes += c.length;
        }
    }
    return rep;
}

// --- WriteSession ---

WriteSession::WriteSession(Store& store, std::string file_id,
                           ChunkingPolicy policy, HashEngine& engine,
                           std::optional<BlockMap> previous)
    : store_(store),
      file_id_(std::move(file_id)),
      policy_(std::move(policy)),
      engine_(engine),
      previous_(std::move(previous)) {
    if (previous_) {
        previous_digests_.reserve(previous_->blocks.size());
        for (const auto& b : previous_->blocks)
            previous_digests_.insert(b.digest);
    }
}

WriteSession::~WriteSession() {
    if (!released_) store_.release_writer(file_id_);
}

void WriteSession::write(hashcore::ByteView data) {
    if (done_) throw std::logic_error("write after commit");
    if (failed_) throw TransportError("session has failed");
    pending_.insert(pending_.end(), data.begin(), data.end());
    stream_len_ += data.size();
    buffered_since_flush_ += data.size();
    if (buffered_since_flush_ >= store_.config().write_buffer_bytes)
        flush(false);
}

void WriteSession::flush(bool final) {
    try {
        const std::uint64_t base = chunk_start_; // pending_[0] is at base
        std::vector<accelerant::ByteRange> completed;

        if (policy_.kind == ChunkingPolicy::Kind::fixed) {
            const std::uint64_t block = policy_.fixed_size;
            while (stream_len_ - chunk_start_ >= block) {
                completed.push_back({chunk_start_ - base,
                                     static_cast<std::uint32_t>(block)});
                chunk_start_ += block;
            }
        } else {
            const std::size_t w = policy_.window.window;
            const std::size_t stride = policy_.window.stride;
            for (;;) {
                const std::uint64_t force_at = chunk_start_ + policy_.max_chunk;
                const std::uint64_t min_eval =
                    chunk_start_ +
                    (policy_.min_chunk > w ? policy_.min_chunk - w : 0);
                const std::uint64_t i = std::max(next_window_, min_eval);
                const std::uint64_t cap = std::min<std::uint64_t>(
                    stream_len_, force_at);
                std::uint64_t cut = 0;

                if (i + w <= cap) {
                    const hashcore::ByteView region{
                        pending_.data() + (i - base),
                        static_cast<std::size_t>(cap - i)};
                    auto hits = engine_.window_scan(region, policy_.window);
                    for (const auto& h : hits) {
                        if (h.boundary) {
                            cut = i + h.offset + w;
                            break;
                        }
                    }
                    if (cut == 0) next_window_ = i + stride * hits.size();
                }

                if (cut != 0) {
                    completed.push_back(
                        {chunk_start_ - base,
                         static_cast<std::uint32_t>(cut - chunk_start_)});
                    chunk_start_ = cut;
                    next_window_ = cut;
                } else if (stream_len_ >= force_at) {
                    completed.push_back(
                        {chunk_start_ - base,
                         static_cast<std::uint32_t>(policy_.max_chunk)});
                    chunk_start_ = force_at;
                    next_window_ = force_at;
                } else {
                    break;
                }
            }
        }

        if (final && stream_len_ > chunk_start_) {
            completed.push_back(
                {chunk_start_ - base,
                 static_cast<std::uint32_t>(stream_len_ - chunk_start_)});
            chunk_start_ = stream_len_;
            next_window_ = stream_len_;
        }

        if (!completed.empty()) {
            auto digests = engine_.block_digests(
                {pending_.data(), pending_.size()}, completed,
                policy_.digest_params);
            for (std::size_t k = 0; k < completed.size(); ++k) {
                Chunk c;
                c.offset = base + completed[k].offset;
                c.length = completed[k].length;
                c.digest = digests[k];
                if (!previous_digests_.contains(c.digest)) {
                    auto begin = pending_.begin() +
                                 static_cast<std::ptrdiff_t>(completed[k].offset);
                    new_blocks_.emplace_back(
                        chunks_.size(),
                        std::vector<std::uint8_t>(begin, begin + c.length));
                }
                chunks_.push_back(c);
            }
            pending_.erase(pending_.begin(),
                           pending_.begin() +
                               static_cast<std::ptrdiff_t>(chunk_start_ - base));
        }
        buffered_since_flush_ = 0;
    } catch (...) {
        failed_ = true;
        throw;
    }
}

CommitResult WriteSession::commit() {
    if (done_) throw std::logic_error("commit called twice");
    if (failed_) throw TransportError("session has failed");
    flush(true);
    auto result = store_.finish_commit(*this);
    if (!released_) {
        released_ = true;
        store_.release_writer(file_id_);
    }
    return result;
}

void WriteSession::abort() {
    failed_ = true;
    if (!released_) {
        released_ = true;
        store_.release_writer(file_id_);
    }
}

// --- Store ---

Store::Store(MetadataService& meta,
             std::vector<std::shared_ptr<BlockStore>> nodes, StoreConfig cfg)
    : meta_(meta), nodes_(std::move(nodes)), cfg_(cfg) {
    if (cfg_.stripe_width == 0) cfg_.stripe_width = 1;
}

std::unique_ptr<WriteSession> Store::begin_write(const std::string& file_id,
                                                 ChunkingPolicy policy,
                                                 HashEngine& engine) {
    if (file_id.empty() || file_id.find('\0') != std::string::npos)
        throw std::invalid_argument("invalid file id");
    if (!policy.valid()) throw std::invalid_argument("invalid chunking policy");
    // One digest scheme per deployment: nodes verify against it.
    policy.digest_params = cfg_.digest_params;
    {
        std::lock_guard lock(mu_);
        if (!active_writers_.insert(file_id).second)
            throw ConflictError("file already has an active write session");
    }
    std::optional<BlockMap> previous;
    try {
        previous = meta_.get_blockmap(file_id);
    } catch (...) {
        release_writer(file_id);
        throw;
    }
    return std::unique_ptr<WriteSession>(new WriteSession(
        *this, file_id, std::move(policy), engine, std::move(previous)));
}

void Store::release_writer(const std::string& file_id) {
    std::lock_guard lock(mu_);
    active_writers_.erase(file_id);
}

CommitResult Store::finish_commit(WriteSession& s) {
    CommitResult result;
    result.map.file_id = s.file_id_;
    result.map.version = s.previous_ ? s.previous_->version + 1 : 1;
    for (const auto& c : s.chunks_)
        result.map.blocks.push_back({c.offset, c.length, c.digest});

    const unsigned width =
        std::min<unsigned>(cfg_.stripe_width,
                           static_cast<unsigned>(nodes_.size()));
    result.per_node_bytes.assign(nodes_.size(), 0);

    if (!s.new_blocks_.empty()) {
        if (width == 0) {
            s.failed_ = true;
            throw TransportError("no storage nodes available");
        }
        // block k goes to node (k mod stripe_width); lanes run concurrently
        std::vector<std::string> lane_errors(width);
        std::vector<std::thread> lanes;
        for (unsigned lane = 0; lane < width; ++lane) {
            lanes.emplace_back([&, lane] {
                try {
                    for (std::size_t k = lane; k < s.new_blocks_.size();
                         k += width) {
                        const auto& [chunk_idx, bytes] = s.new_blocks_[k];
                        const Chunk& c = s.chunks_[chunk_idx];
                        nodes_[lane]->put_block(c.digest,
                                                {bytes.data(), bytes.size()});
                        result.per_node_bytes[lane] += bytes.size();
                    }
                } catch (const std::exception& e) {
                    lane_errors[lane] = e.what();
                }
            });
        }
        for (auto& t : lanes) t.join();
        for (const auto& err : lane_errors) {
            if (!err.empty()) {
                s.failed_ = true;
                throw TransportError("block upload failed: " + err);
            }
        }
    }

    std::optional<std::uint64_t> expected;
    if (s.previous_) expected = s.previous_->version;
    try {
        meta_.put_blockmap(result.map, expected);
    } catch (...) {
        s.failed_ = true;
        throw;
    }

    result.report = similarity(s.previous_ ? *s.previous_ : BlockMap{},
                               s.chunks_);
    for (auto b : result.per_node_bytes) result.uploaded_bytes += b;
    {
        std::lock_guard lock(mu_);
        total_uploaded_ += result.uploaded_bytes;
    }
    s.done_ = true;
    return result;
}

std::vector<std::uint8_t> Store::read(const std::string& file_id) {
    auto map = meta_.get_blockmap(file_id);
    if (!map) throw NotFoundError("unknown file: " + file_id);

    std::vector<std::uint8_t> out(map->file_size());
    for (std::size_t i = 0; i < map->blocks.size(); ++i) {
        const auto& rec = map->blocks[i];
        std::vector<std::uint8_t> bytes;
        bool found = false;
        for (std::size_t t = 0; t < nodes_.size() && !found; ++t) {
            auto& node = nodes_[(i + t) % nodes_.size()];
            try {
                bytes = node->get_block(rec.digest);
                found = true;
            } catch (const NotFoundError&) {
            }
        }
        if (!found)
            throw IntegrityError("block missing from every storage node");
        if (bytes.size() != rec.length)
            throw IntegrityError("stored block length mismatch");
        if (cfg_.verify_reads &&
            hashcore::direct_hash({bytes.data(), bytes.size()},
                                  cfg_.digest_params) != rec.digest)
            throw IntegrityError("stored block failed its digest check");
        std::memcpy(out.data() + rec.offset, bytes.data(), bytes.size());
    }
    return out;
}

std::uint64_t Store::total_uploaded_bytes() const {
    std::lock_guard lock(mu_);
    return total_uploaded_;
}

} // namespace chunkforge::castore
