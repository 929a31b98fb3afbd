#ifndef CHUNKFORGE_TEST_UTIL_HPP
#define CHUNKFORGE_TEST_UTIL_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "chunkforge/chunker.hpp"
#include "chunkforge/hashcore.hpp"
#include "chunkforge/md5.hpp"

namespace testutil {

inline std::vector<std::uint8_t> random_bytes(std::size_t n,
                                              std::mt19937_64& rng) {
    std::vector<std::uint8_t> data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    return data;
}

inline chunkforge::hashcore::ByteView view(
    const std::vector<std::uint8_t>& v) {
    return {v.data(), v.size()};
}

// Independent single-threaded reference of the segmented hash construction:
// hash each segment, concatenate the raw digests, hash the concatenation.
inline chunkforge::Digest reference_segmented_hash(
    chunkforge::hashcore::ByteView data, std::size_t segment_size) {
    std::vector<std::uint8_t> concat;
    for (std::size_t off = 0; off < data.size(); off += segment_size) {
        const std::size_t len = std::min(segment_size, data.size() - off);
        auto d = chunkforge::Md5::sum(data.subspan(off, len));
        concat.insert(concat.end(), d.begin(), d.end());
    }
    auto outer = chunkforge::Md5::sum({concat.data(), concat.size()});
    chunkforge::Digest result;
    result.len = 16;
    std::copy(outer.begin(), outer.end(), result.bytes.begin());
    return result;
}

// Brute-force one-shot reference chunker: walks the whole input once,
// re-deriving every rule (min-skip, boundary cut at window end, forced cut at
// max) without any streaming state.
inline std::vector<chunkforge::Chunk> reference_chunk_cdc(
    chunkforge::hashcore::ByteView data, const chunkforge::ChunkingPolicy& p) {
    using namespace chunkforge;
    std::vector<Chunk> out;
    const std::size_t w = p.window.window;
    std::uint64_t start = 0;
    while (start < data.size()) {
        std::uint64_t cut = 0;
        std::uint64_t i =
            start + (p.min_chunk > w ? p.min_chunk - w : 0);
        for (; i + w <= data.size() && i + w <= start + p.max_chunk;
             i += p.window.stride) {
            auto d = hashcore::base_hash(data.subspan(i, w),
                                         p.window.algorithm);
            if (hashcore::is_boundary(d, p.window)) {
                cut = i + w;
                break;
            }
        }
        if (cut == 0) {
            if (data.size() >= start + p.max_chunk)
                cut = start + p.max_chunk;
            else
                cut = data.size(); // final short chunk
        }
        Chunk c;
        c.offset = start;
        c.length = static_cast<std::uint32_t>(cut - start);
        c.digest = hashcore::direct_hash(
            data.subspan(start, static_cast<std::size_t>(cut - start)),
            p.digest_params);
        out.push_back(c);
        start = cut;
    }
    return out;
}

// Small, fast policy for desk-scale chunker tests.
inline chunkforge::ChunkingPolicy small_cdc_policy() {
    chunkforge::hashcore::WindowHashParams wp;
    wp.window = 16;
    wp.stride = 1;
    wp.boundary_bits = 6;
    wp.boundary_target = 0;
    auto p = chunkforge::ChunkingPolicy::content_defined(wp, 64, 1024);
    p.digest_params.segment_size = 256;
    return p;
}

} // namespace testutil

#endif
