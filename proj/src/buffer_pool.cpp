#include "chunkforge/accelerant/buffer_pool.hpp"

#include <bit>

namespace chunkforge::accelerant {

namespace {
constexpr std::size_t kMinClassBytes = 4 * 1024;
}

BufferPool::BufferPool(std::size_t depth_per_class, std::size_t max_class_bytes,
                       bool reuse_enabled)
    : depth_(depth_per_class),
      max_class_bytes_(max_class_bytes),
      reuse_(reuse_enabled) {
    std::size_t classes = 1;
    for (std::size_t c = kMinClassBytes; c < max_class_bytes_; c *= 2) ++classes;
    free_lists_.resize(classes);
}

std::size_t BufferPool::class_for(std::size_t size) {
    std::size_t bytes = kMinClassBytes;
    std::size_t idx = 0;
    while (bytes < size) {
        bytes *= 2;
        ++idx;
    }
    return idx;
}

BufferHandle BufferPool::acquire(std::size_t size) {
    if (size == 0) throw std::invalid_argument("acquire of zero bytes");
    if (size > max_class_bytes_)
        throw std::length_error("requested buffer exceeds maximum size class");

    const std::size_t idx = class_for(size);
    const std::size_t cap = kMinClassBytes << idx;

    std::lock_guard lock(mu_);
    if (shut_down_) throw OwnershipError("pool is shut down");

    BufferHandle h;
    if (reuse_ && !free_lists_[idx].empty()) {
        h = std::move(free_lists_[idx].back());
        free_lists_[idx].pop_back();
        ++stats_.pool_hits;
    } else {
        h.data_ = std::make_unique<std::uint8_t[]>(cap);
        h.capacity_ = cap;
        h.class_index_ = idx;
        h.serial_ = next_serial_++;
        ++stats_.allocations_total;
    }
    h.used_ = size;
    live_.insert(h.serial_);
    ++stats_.outstanding;
    return h;
}

void BufferPool::release(BufferHandle&& handle) {
    std::lock_guard lock(mu_);
    if (shut_down_) return;
    if (!handle.valid() || live_.erase(handle.serial_) == 0)
        throw OwnershipError("release of a buffer not owned by this pool");
    --stats_.outstanding;
    auto& list = free_lists_[handle.class_index_];
    if (reuse_ && list.size() < depth_) {
        handle.used_ = 0;
        list.push_back(std::move(handle));
    }
    // otherwise the buffer is freed on scope exit
}

void BufferPool::warm_up(std::size_t warm_bytes) {
    std::lock_guard lock(mu_);
    const std::size_t idx = class_for(std::min(warm_bytes, max_class_bytes_));
    {
        while (free_lists_[idx].size() < depth_) {
            BufferHandle h;
            const std::size_t cap = kMinClassBytes << idx;
            h.data_ = std::make_unique<std::uint8_t[]>(cap);
            h.capacity_ = cap;
            h.class_index_ = idx;
            h.serial_ = next_serial_++;
            ++stats_.allocations_total;
            free_lists_[idx].push_back(std::move(h));
        }
    }
}

void BufferPool::shutdown() {
    std::lock_guard lock(mu_);
    shut_down_ = true;
    for (auto& list : free_lists_) list.clear();
}

BufferPoolStats BufferPool::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

} // namespace chunkforge::accelerant
