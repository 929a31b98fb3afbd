#ifndef CHUNKFORGE_WIRE_HPP
#define CHUNKFORGE_WIRE_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chunkforge::wire {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Little-endian append-only byte writer.
class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void bytes(std::span<const std::uint8_t> v) {
        buf_.insert(buf_.end(), v.begin(), v.end());
    }
    // u16 length-prefixed string
    void str16(const std::string& s) {
        if (s.size() > 0xffff) throw std::length_error("string too long");
        u16(static_cast<std::uint16_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    std::vector<std::uint8_t> take() { return std::move(buf_); }
    const std::vector<std::uint8_t>& view() const { return buf_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::string str16() {
        std::size_t n = u16();
        auto s = bytes(n);
        return {reinterpret_cast<const char*>(s.data()), s.size()};
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    std::span<const std::uint8_t> rest() { return bytes(remaining()); }
    void expect_end() const {
        if (pos_ != data_.size()) throw DecodeError("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw DecodeError("message truncated");
    }
    std::uint64_t le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace chunkforge::wire

#endif
