#ifndef CHUNKFORGE_HASHCORE_HPP
#define CHUNKFORGE_HASHCORE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "chunkforge/digest.hpp"

namespace chunkforge::hashcore {

using ByteView = std::span<const std::uint8_t>;

// Parameters for segmented (parallel Merkle-Damgard) hashing: the input is
// split into fixed-size segments, each segment hashed independently, and the
// concatenated intermediate digests hashed once more sequentially.
struct SegmentedHashParams {
    std::size_t segment_size = 64 * 1024;
    HashAlgorithm algorithm = HashAlgorithm::md5;

    bool valid() const { return segment_size > 0; }
};

// Parameters for sliding-window hashing and the boundary predicate.
struct WindowHashParams {
    std::size_t window = 48;
    std::size_t stride = 1;
    unsigned boundary_bits = 13;      // 0..=32
    std::uint32_t boundary_target = 0; // < 2^boundary_bits
    HashAlgorithm algorithm = HashAlgorithm::md5;

    bool valid() const {
        return window >= 1 && stride >= 1 && boundary_bits <= 32 &&
               (boundary_bits == 32 ||
                boundary_target < (std::uint64_t{1} << boundary_bits));
    }
};

struct WindowHash {
    std::uint64_t offset;
    Digest digest;
};

Digest base_hash(ByteView data, HashAlgorithm algorithm);

// Parallel Merkle-Damgard direct hash. The result depends only on data and
// params, never on worker count (the final outer hash is one sequential step).
Digest direct_hash(ByteView data, const SegmentedHashParams& params,
                   unsigned workers = 1);

// One entry per offset i in {0, stride, 2*stride, ...} with i + window <= len,
// ascending by offset.
std::vector<WindowHash> window_hashes(ByteView data,
                                      const WindowHashParams& params,
                                      unsigned workers = 1);

// Reads the first 8 digest bytes as a little-endian u64 v and tests
// (v mod 2^bits) == target. bits == 0 matches every digest.
bool is_boundary(const Digest& digest, unsigned bits, std::uint32_t target);

inline bool is_boundary(const Digest& digest, const WindowHashParams& p) {
    return is_boundary(digest, p.boundary_bits, p.boundary_target);
}

} // namespace chunkforge::hashcore

#endif
