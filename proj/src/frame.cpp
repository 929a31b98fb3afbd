#include "chunkforge/netstore/frame.hpp"

#include "chunkforge/wire.hpp"

namespace chunkforge::netstore {

using wire::Reader;
using wire::Writer;

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    if (frame.payload.size() > kMaxPayloadBytes)
        throw std::length_error("frame payload exceeds 16 MiB");
    Writer w;
    w.u32(static_cast<std::uint32_t>(kFrameHeaderBytes + frame.payload.size()));
    w.u8(frame.opcode);
    w.u64(frame.request_id);
    w.bytes({frame.payload.data(), frame.payload.size()});
    return w.take();
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const std::uint32_t total = r.u32();
    if (total != bytes.size() || total < kFrameHeaderBytes)
        throw wire::DecodeError("frame length mismatch");
    Frame f;
    f.opcode = r.u8();
    f.request_id = r.u64();
    auto rest = r.rest();
    f.payload.assign(rest.begin(), rest.end());
    return f;
}

namespace {

void write_digest(Writer& w, const Digest& d) {
    w.u8(d.len);
    w.bytes(d.view());
}

Digest read_digest(Reader& r) {
    const std::uint8_t len = r.u8();
    if (len > Digest::kMaxLen) throw wire::DecodeError("digest too long");
    Digest d;
    auto b = r.bytes(len);
    std::memcpy(d.bytes.data(), b.data(), len);
    d.len = len;
    return d;
}

} // namespace

std::vector<std::uint8_t> payload_put_block(const Digest& digest,
                                            hashcore::ByteView data) {
    Writer w;
    write_digest(w, digest);
    w.bytes(data);
    return w.take();
}

std::vector<std::uint8_t> payload_digest(const Digest& digest) {
    Writer w;
    write_digest(w, digest);
    return w.take();
}

std::vector<std::uint8_t> payload_get_blockmap(const std::string& file_id) {
    Writer w;
    w.str16(file_id);
    return w.take();
}

std::vector<std::uint8_t>
payload_put_blockmap(std::optional<std::uint64_t> expected_version,
                     const castore::BlockMap& map) {
    Writer w;
    w.u64(expected_version.value_or(castore::MetadataService::kNoVersion));
    w.bytes(castore::serialize_blockmap(map));
    return w.take();
}

std::vector<std::uint8_t>
payload_register_node(const castore::NodeAddress& addr) {
    Writer w;
    w.str16(addr.host);
    w.u16(addr.port);
    return w.take();
}

std::vector<std::uint8_t> payload_error(std::uint16_t code,
                                        const std::string& message) {
    Writer w;
    w.u16(code);
    w.str16(message);
    return w.take();
}

std::vector<std::uint8_t>
payload_node_list(const std::vector<castore::NodeAddress>& nodes) {
    Writer w;
    w.u16(static_cast<std::uint16_t>(nodes.size()));
    for (const auto& n : nodes) {
        w.str16(n.host);
        w.u16(n.port);
    }
    return w.take();
}

PutBlockRequest parse_put_block(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    PutBlockRequest req;
    req.digest = read_digest(r);
    auto rest = r.rest();
    req.data.assign(rest.begin(), rest.end());
    return req;
}

Digest parse_digest(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    Digest d = read_digest(r);
    r.expect_end();
    return d;
}

std::string parse_get_blockmap(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    std::string id = r.str16();
    r.expect_end();
    return id;
}

PutBlockMapRequest parse_put_blockmap(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    PutBlockMapRequest req;
    const std::uint64_t v = r.u64();
    if (v != castore::MetadataService::kNoVersion) req.expected_version = v;
    req.map = castore::parse_blockmap(r.rest());
    return req;
}

castore::NodeAddress
parse_register_node(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    castore::NodeAddress addr;
    addr.host = r.str16();
    addr.port = r.u16();
    r.expect_end();
    return addr;
}

WireError parse_error(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    WireError err;
    err.code = r.u16();
    err.message = r.str16();
    r.expect_end();
    return err;
}

std::vector<castore::NodeAddress>
parse_node_list(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const std::uint16_t count = r.u16();
    std::vector<castore::NodeAddress> nodes;
    nodes.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        castore::NodeAddress addr;
        addr.host = r.str16();
        addr.port = r.u16();
        nodes.push_back(addr);
    }
    r.expect_end();
    return nodes;
}

void throw_wire_error(const WireError& err) {
    switch (err.code) {
    case errc::kNotFound: throw castore::NotFoundError(err.message);
    case errc::kConflict: throw castore::ConflictError(err.message);
    case errc::kIntegrity: throw castore::IntegrityError(err.message);
    case errc::kCapacity: throw castore::CapacityError(err.message);
    default: throw castore::TransportError(err.message);
    }
}

} // namespace chunkforge::netstore
