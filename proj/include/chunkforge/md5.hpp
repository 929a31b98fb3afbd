#ifndef CHUNKFORGE_MD5_HPP
#define CHUNKFORGE_MD5_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace chunkforge {

// Incremental MD5 (RFC 1321).
class Md5 {
public:
    Md5() { reset(); }

    void reset();
    void update(std::span<const std::uint8_t> data);
    std::array<std::uint8_t, 16> finish();

    static std::array<std::uint8_t, 16> sum(std::span<const std::uint8_t> data) {
        Md5 ctx;
        ctx.update(data);
        return ctx.finish();
    }

private:
    void compress(const std::uint8_t* block);

    std::uint32_t state_[4];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffered_ = 0;
};

} // namespace chunkforge

#endif
