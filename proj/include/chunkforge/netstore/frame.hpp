#ifndef CHUNKFORGE_NETSTORE_FRAME_HPP
#define CHUNKFORGE_NETSTORE_FRAME_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chunkforge/castore/blockmap.hpp"
#include "chunkforge/castore/store.hpp"

namespace chunkforge::netstore {

// Frame layout: [total_length u32 LE][opcode u8][request_id u64 LE][payload].
// total_length covers the whole frame including its own four bytes.
// A response echoes the request_id and sets opcode | 0x80.

namespace op {
constexpr std::uint8_t kPutBlock = 0x01;
constexpr std::uint8_t kGetBlock = 0x02;
constexpr std::uint8_t kHasBlock = 0x03;
constexpr std::uint8_t kGetBlockMap = 0x10;
constexpr std::uint8_t kPutBlockMap = 0x11;
constexpr std::uint8_t kListNodes = 0x12;
constexpr std::uint8_t kRegisterNode = 0x20;
constexpr std::uint8_t kError = 0x7f;
constexpr std::uint8_t kResponseBit = 0x80;
} // namespace op

namespace errc {
constexpr std::uint16_t kNotFound = 1;
constexpr std::uint16_t kConflict = 2;
constexpr std::uint16_t kIntegrity = 3;
constexpr std::uint16_t kCapacity = 4;
constexpr std::uint16_t kMalformed = 5;
} // namespace errc

constexpr std::size_t kFrameHeaderBytes = 13;
constexpr std::size_t kMaxPayloadBytes = 16 * 1024 * 1024;

struct Frame {
    std::uint8_t opcode = 0;
    std::uint64_t request_id = 0;
    std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
// Parses one complete frame; the input must be exactly one frame.
Frame decode_frame(std::span<const std::uint8_t> bytes);

// payload builders / parsers
std::vector<std::uint8_t> payload_put_block(const Digest& digest,
                                            hashcore::ByteView data);
std::vector<std::uint8_t> payload_digest(const Digest& digest);
std::vector<std::uint8_t> payload_get_blockmap(const std::string& file_id);
std::vector<std::uint8_t>
payload_put_blockmap(std::optional<std::uint64_t> expected_version,
                     const castore::BlockMap& map);
std::vector<std::uint8_t> payload_register_node(const castore::NodeAddress&);
std::vector<std::uint8_t> payload_error(std::uint16_t code,
                                        const std::string& message);
std::vector<std::uint8_t>
payload_node_list(const std::vector<castore::NodeAddress>& nodes);

struct PutBlockRequest {
    Digest digest;
    std::vector<std::uint8_t> data;
};
PutBlockRequest parse_put_block(std::span<const std::uint8_t> payload);
Digest parse_digest(std::span<const std::uint8_t> payload);
std::string parse_get_blockmap(std::span<const std::uint8_t> payload);
struct PutBlockMapRequest {
    std::optional<std::uint64_t> expected_version;
    castore::BlockMap map;
};
PutBlockMapRequest parse_put_blockmap(std::span<const std::uint8_t> payload);
castore::NodeAddress parse_register_node(std::span<const std::uint8_t> payload);
struct WireError {
    std::uint16_t code = 0;
    std::string message;
};
WireError parse_error(std::span<const std::uint8_t> payload);
std::vector<castore::NodeAddress>
parse_node_list(std::span<const std::uint8_t> payload);

// Maps a wire error to the matching castore exception and throws it.
[[noreturn]] void throw_wire_error(const WireError& err);

} // namespace chunkforge::netstore

#endif
