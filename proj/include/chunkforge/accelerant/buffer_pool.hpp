#ifndef CHUNKFORGE_ACCELERANT_BUFFER_POOL_HPP
#define CHUNKFORGE_ACCELERANT_BUFFER_POOL_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace chunkforge::accelerant {

class BufferPool;

// Pooled staging buffer. Owned by exactly one party (pool, client, or an
// in-flight task) at any instant; movable, not copyable.
class BufferHandle {
public:
    BufferHandle() = default;
    BufferHandle(BufferHandle&& o) noexcept { *this = std::move(o); }
    BufferHandle& operator=(BufferHandle&& o) noexcept {
        data_ = std::move(o.data_);
        capacity_ = o.capacity_;
        used_ = o.used_;
        serial_ = o.serial_;
        class_index_ = o.class_index_;
        o.capacity_ = o.used_ = 0;
        o.serial_ = 0;
        return *this;
    }
    BufferHandle(const BufferHandle&) = delete;
    BufferHandle& operator=(const BufferHandle&) = delete;

    bool valid() const { return serial_ != 0; }
    std::size_t capacity() const { return capacity_; }
    std::size_t used() const { return used_; }
    void set_used(std::size_t n) {
        if (n > capacity_) throw std::length_error("used exceeds capacity");
        used_ = n;
    }
    std::uint8_t* data() { return data_.get(); }
    const std::uint8_t* data() const { return data_.get(); }
    std::span<const std::uint8_t> contents() const { return {data_.get(), used_}; }
    std::uint64_t serial() const { return serial_; }

private:
    friend class BufferPool;
    std::unique_ptr<std::uint8_t[]> data_;
    std::size_t capacity_ = 0;
    std::size_t used_ = 0;
    std::uint64_t serial_ = 0;
    std::size_t class_index_ = 0;
};

struct BufferPoolStats {
    std::uint64_t allocations_total = 0;
    std::uint64_t pool_hits = 0;
    std::uint64_t outstanding = 0;
};

class OwnershipError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Size-class free lists with a configured retention depth per class.
// Thread-safe. Capacities are power-of-two classes starting at 4 KiB.
class BufferPool {
public:
    explicit BufferPool(std::size_t depth_per_class = 4,
                        std::size_t max_class_bytes = 64 * 1024 * 1024,
                        bool reuse_enabled = true);

    BufferHandle acquire(std::size_t size);

    // Double release or a handle from another pool raises OwnershipError.
    // After shutdown() release is a benign no-op.
    void release(BufferHandle&& handle);

    // Pre-populates the size class holding warm_bytes with depth buffers.
    void warm_up(std::size_t warm_bytes);

    void shutdown();
    BufferPoolStats stats() const;

private:
    static std::size_t class_for(std::size_t size);

    mutable std::mutex mu_;
    std::size_t depth_;
    std::size_t max_class_bytes_;
    bool reuse_;
    bool shut_down_ = false;
    std::uint64_t next_serial_ = 1;
    std::unordered_set<std::uint64_t> live_;
    std::vector<std::vector<BufferHandle>> free_lists_;
    BufferPoolStats stats_;
};

} // namespace chunkforge::accelerant

#endif
