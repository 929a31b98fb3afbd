#ifndef CHUNKFORGE_CASTORE_BLOCKMAP_HPP
#define CHUNKFORGE_CASTORE_BLOCKMAP_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chunkforge/digest.hpp"

namespace chunkforge::castore {

struct BlockRecord {
    std::uint64_t offset = 0;
    std::uint32_t length = 0;
    Digest digest;

    friend bool operator==(const BlockRecord& a, const BlockRecord& b) {
        return a.offset == b.offset && a.length == b.length &&
               a.digest == b.digest;
    }
};

// Per-file, per-version ordered list of block records.
struct BlockMap {
    std::string file_id;
    std::uint64_t version = 0;
    std::vector<BlockRecord> blocks;

    std::uint64_t file_size() const {
        std::uint64_t n = 0;
        for (const auto& b : blocks) n += b.length;
        return n;
    }

    // Contiguous from offset 0, non-overlapping, positive lengths.
    bool well_formed() const {
        std::uint64_t expect = 0;
        for (const auto& b : blocks) {
            if (b.offset != expect || b.length == 0) return false;
            expect += b.length;
        }
        return true;
    }

    friend bool operator==(const BlockMap& a, const BlockMap& b) {
        return a.file_id == b.file_id && a.version == b.version &&
               a.blocks == b.blocks;
    }
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// MSBM serialization: magic "MSBM", format version u16, file_id (u16
// length-prefixed UTF-8), map version u64, record count u32, then per record
// {offset u64, length u32, digest length u8, digest bytes}. Little-endian.
std::vector<std::uint8_t> serialize_blockmap(const BlockMap& map);
BlockMap parse_blockmap(std::span<const std::uint8_t> bytes);

} // namespace chunkforge::castore

#endif
