#include "chunkforge/castore/blockmap.hpp"

#include "chunkforge/wire.hpp"

namespace chunkforge::castore {

namespace {
constexpr std::uint8_t kMagic[4] = {'M', 'S', 'B', 'M'};
constexpr std::uint16_t kFormatVersion = 1;
} // namespace

std::vector<std::uint8_t> serialize_blockmap(const BlockMap& map) {
    if (map.file_id.empty() || map.file_id.find('\0') != std::string::npos)
        throw FormatError("invalid file id");
    if (!map.well_formed())
        throw FormatError("block records not contiguous");
    wire::Writer w;
    w.bytes(kMagic);
    w.u16(kFormatVersion);
    w.str16(map.file_id);
    w.u64(map.version);
    w.u32(static_cast<std::uint32_t>(map.blocks.size()));
    for (const auto& b : map.blocks) {
        w.u64(b.offset);
        w.u32(b.length);
        w.u8(b.digest.len);
        w.bytes(b.digest.view());
    }
    return w.take();
}

BlockMap parse_blockmap(std::span<const std::uint8_t> bytes) try {
    wire::Reader r(bytes);
    auto magic = r.bytes(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0)
        throw FormatError("bad block-map magic");
    if (r.u16() != kFormatVersion)
        throw FormatError("unsupported block-map format version");

    BlockMap map;
    map.file_id = r.str16();
    if (map.file_id.empty() ||
        map.file_id.find('\0') != std::string::npos)
        throw FormatError("invalid file id");
    map.version = r.u64();
    const std::uint32_t count = r.u32();
    map.blocks.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        BlockRecord rec;
        rec.offset = r.u64();
        rec.length = r.u32();
        const std::uint8_t dlen = r.u8();
        if (dlen > Digest::kMaxLen) throw FormatError("digest too long");
        auto d = r.bytes(dlen);
        std::memcpy(rec.digest.bytes.data(), d.data(), dlen);
        rec.digest.len = dlen;
        map.blocks.push_back(rec);
    }
    r.expect_end();
    if (!map.well_formed()) throw FormatError("block records not contiguous");
    return map;
} catch (const wire::DecodeError& e) {
    throw FormatError(e.what());
}

} // namespace chunkforge::castore
