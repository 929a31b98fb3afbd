#ifndef CHUNKFORGE_DIGEST_HPP
#define CHUNKFORGE_DIGEST_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace chunkforge {

enum class HashAlgorithm : std::uint8_t {
    md5 = 1,
};

inline std::size_t digest_length(HashAlgorithm alg) {
    switch (alg) {
    case HashAlgorithm::md5: return 16;
    }
    return 0;
}

// Fixed-length hash value; the unit of content identity.
struct Digest {
    static constexpr std::size_t kMaxLen = 16;

    std::array<std::uint8_t, kMaxLen> bytes{};
    std::uint8_t len = 0;
    HashAlgorithm algorithm = HashAlgorithm::md5;

    std::span<const std::uint8_t> view() const { return {bytes.data(), len}; }

    friend bool operator==(const Digest& a, const Digest& b) {
        return a.len == b.len && a.algorithm == b.algorithm &&
               std::memcmp(a.bytes.data(), b.bytes.data(), a.len) == 0;
    }
    friend bool operator!=(const Digest& a, const Digest& b) { return !(a == b); }
    friend bool operator<(const Digest& a, const Digest& b) {
        int c = std::memcmp(a.bytes.data(), b.bytes.data(),
                            a.len < b.len ? a.len : b.len);
        if (c != 0) return c < 0;
        return a.len < b.len;
    }

    std::string hex() const {
        static const char* lut = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (std::size_t i = 0; i < len; ++i) {
            out.push_back(lut[bytes[i] >> 4]);
            out.push_back(lut[bytes[i] & 0xf]);
        }
        return out;
    }
};

struct DigestHasher {
    std::size_t operator()(const Digest& d) const {
        // digests are uniformly distributed; the prefix is a fine hash
        std::uint64_t v = 0;
        std::memcpy(&v, d.bytes.data(), sizeof v);
        return static_cast<std::size_t>(v);
    }
};

} // namespace chunkforge

#endif
