#ifndef CHUNKFORGE_CHUNKER_HPP
#define CHUNKFORGE_CHUNKER_HPP

#include <cstdint>
#include <vector>

#include "chunkforge/hashcore.hpp"

namespace chunkforge {

struct ChunkingPolicy {
    enum class Kind { fixed, content_defined };

    Kind kind = Kind::fixed;
    std::size_t fixed_size = 1024 * 1024;
    hashcore::WindowHashParams window;
    std::size_t min_chunk = 256 * 1024;
    std::size_t max_chunk = 4 * 1024 * 1024;
    hashcore::SegmentedHashParams digest_params;

    static ChunkingPolicy fixed(std::size_t block_size) {
        ChunkingPolicy p;
        p.kind = Kind::fixed;
        p.fixed_size = block_size;
        p.min_chunk = block_size;
        p.max_chunk = block_size;
        return p;
    }

    static ChunkingPolicy content_defined(hashcore::WindowHashParams w,
                                          std::size_t min_chunk,
                                          std::size_t max_chunk) {
        ChunkingPolicy p;
        p.kind = Kind::content_defined;
        p.window = w;
        p.min_chunk = min_chunk;
        p.max_chunk = max_chunk;
        return p;
    }

    bool valid() const {
        if (kind == Kind::fixed) return fixed_size > 0;
        return window.valid() && min_chunk > 0 && min_chunk <= max_chunk &&
               window.window <= max_chunk;
    }
};

// (stream offset, length, digest) triple; element of a block-map.
struct Chunk {
    std::uint64_t offset = 0;
    std::uint32_t length = 0;
    Digest digest;
};

// Streaming chunker with carry-over across arbitrary push boundaries. Emitted
// chunk sequences are identical for every partition of the input into push
// buffers. Single-owner, strictly sequential.
class Chunker {
public:
    explicit Chunker(ChunkingPolicy policy);

    // Appends data and returns any chunks completed by it.
    std::vector<Chunk> push(hashcore::ByteView data);

    // Flushes the pending tail as a final (possibly short) chunk.
    std::vector<Chunk> finish();

    std::uint64_t stream_length() const { return stream_len_; }
    std::uint64_t pending_bytes() const { return stream_len_ - chunk_start_; }

private:
    Chunk emit(std::uint64_t cut);

    ChunkingPolicy policy_;
    std::vector<std::uint8_t> pending_; // bytes [chunk_start_, stream_len_)
    std::uint64_t chunk_start_ = 0;
    std::uint64_t next_window_ = 0;
    std::uint64_t stream_len_ = 0;
};

std::vector<Chunk> chunk_fixed(hashcore::ByteView data, std::size_t block_size,
                               const hashcore::SegmentedHashParams& digest_params = {});

// Equivalent to pushing the whole input once and finishing.
std::vector<Chunk> chunk_whole(hashcore::ByteView data,
                               const ChunkingPolicy& policy);

} // namespace chunkforge

#endif
