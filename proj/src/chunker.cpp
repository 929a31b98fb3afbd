#include "chunkforge/chunker.hpp"

#include <algorithm>
#include <stdexcept>

namespace chunkforge {

Chunker::Chunker(ChunkingPolicy policy) : policy_(std::move(policy)) {
    if (!policy_.valid()) throw std::invalid_argument("invalid chunking policy");
}

Chunk Chunker::emit(std::uint64_t cut) {
    const std::size_t length = static_cast<std::size_t>(cut - chunk_start_);
    Chunk c;
    c.offset = chunk_start_;
    c.length = static_cast<std::uint32_t>(length);
    c.digest = hashcore::direct_hash({pending_.data(), length},
                                     policy_.digest_params);
    pending_.erase(pending_.begin(),
                   pending_.begin() + static_cast<std::ptrdiff_t>(length));
    chunk_start_ = cut;
    next_window_ = cut;
    return c;
}

std::vector<Chunk> Chunker::push(hashcore::ByteView data) {
    pending_.insert(pending_.end(), data.begin(), data.end());
    stream_len_ += data.size();

    std::vector<Chunk> out;

    if (policy_.kind == ChunkingPolicy::Kind::fixed) {
        while (stream_len_ - chunk_start_ >= policy_.fixed_size)
            out.push_back(emit(chunk_start_ + policy_.fixed_size));
        return out;
    }

    const std::size_t w = policy_.window.window;
    const std::size_t stride = policy_.window.stride;

    for (;;) {
        const std::uint64_t force_at = chunk_start_ + policy_.max_chunk;
        // min-chunk is enforced by skipping evaluation: the first window
        // considered ends at chunk_start_ + min_chunk
        const std::uint64_t min_eval =
            chunk_start_ + (policy_.min_chunk > w ? policy_.min_chunk - w : 0);
        std::uint64_t i = std::max(next_window_, min_eval);
        std::uint64_t cut = 0;

        while (i + w <= stream_len_ && i + w <= force_at) {
            Digest d = hashcore::base_hash(
                {pending_.data() + (i - chunk_start_), w},
                policy_.window.algorithm);
            if (hashcore::is_boundary(d, policy_.window)) {
                cut = i + w;
                break;
            }
            i += stride;
        }
        next_window_ = i;

        if (cut != 0) {
            out.push_back(emit(cut));
        } else if (stream_len_ >= force_at) {
            out.push_back(emit(force_at));
        } else {
            break;
        }
    }
    return out;
}

std::vector<Chunk> Chunker::finish() {
    std::vector<Chunk> out;
    if (stream_len_ > chunk_start_) out.push_back(emit(stream_len_));
    return out;
}

std::vector<Chunk> chunk_fixed(hashcore::ByteView data, std::size_t block_size,
                               const hashcore::SegmentedHashParams& digest_params) {
    if (block_size == 0) throw std::invalid_argument("block size must be > 0");
    std::vector<Chunk> out;
    for (std::uint64_t off = 0; off < data.size(); off += block_size) {
        std::size_t len = std::min<std::size_t>(block_size, data.size() - off);
        Chunk c;
        c.offset = off;
        c.length = static_cast<std::uint32_t>(len);
        c.digest = hashcore::direct_hash(data.subspan(off, len), digest_params);
        out.push_back(c);
    }
    return out;
}

std::vector<Chunk> chunk_whole(hashcore::ByteView data,
                               const ChunkingPolicy& policy) {
    Chunker chunker(policy);
    std::vector<Chunk> out = chunker.push(data);
    std::vector<Chunk> tail = chunker.finish();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

} // namespace chunkforge
