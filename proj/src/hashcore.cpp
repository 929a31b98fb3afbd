#include "chunkforge/hashcore.hpp"

#include <cstring>
#include <functional>
#include <stdexcept>
#include <thread>

#include "chunkforge/md5.hpp"

namespace chunkforge::hashcore {

namespace {

void run_partitioned(std::size_t jobs, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (jobs == 0) return;
    if (workers <= 1 || jobs == 1) {
        fn(0, jobs);
        return;
    }
    if (workers > jobs) workers = static_cast<unsigned>(jobs);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t per = jobs / workers, extra = jobs % workers, begin = 0;
    for (unsigned t = 0; t < workers; ++t) {
        std::size_t count = per + (t < extra ? 1 : 0);
        threads.emplace_back(fn, begin, begin + count);
        begin += count;
    }
    for (auto& th : threads) th.join();
}

} // namespace

Digest base_hash(ByteView data, HashAlgorithm algorithm) {
    if (algorithm != HashAlgorithm::md5)
        throw std::invalid_argument("unknown hash algorithm id");
    Digest d;
    d.algorithm = algorithm;
    d.len = 16;
    auto sum = Md5::sum(data);
    std::memcpy(d.bytes.data(), sum.data(), sum.size());
    return d;
}

Digest direct_hash(ByteView data, const SegmentedHashParams& params,
                   unsigned workers) {
    if (!params.valid())
        throw std::invalid_argument("segment_size must be > 0");

    const std::size_t seg = params.segment_size;
    const std::size_t n = (data.size() + seg - 1) / seg; // 0 for empty input

    const std::size_t dlen = digest_length(params.algorithm);
    std::vector<std::uint8_t> intermediate(n * dlen);

    run_partitioned(n, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t off = i * seg;
            std::size_t len = std::min(seg, data.size() - off);
            Digest d = base_hash(data.subspan(off, len), params.algorithm);
            std::memcpy(intermediate.data() + i * dlen, d.bytes.data(), dlen);
        }
    });

    // final hash of the intermediary hashes is a single sequential step
    return base_hash({intermediate.data(), intermediate.size()},
                     params.algorithm);
}

std::vector<WindowHash> window_hashes(ByteView data,
                                      const WindowHashParams& params,
                                      unsigned workers) {
    if (!params.valid())
        throw std::invalid_argument("invalid window hash params");

    if (data.size() < params.window) return {};
    const std::size_t count = (data.size() - params.window) / params.stride + 1;

    std::vector<WindowHash> out(count);
    run_partitioned(count, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            std::size_t off = k * params.stride;
            out[k].offset = off;
            out[k].digest =
                base_hash(data.subspan(off, params.window), params.algorithm);
        }
    });
    return out;
}

bool is_boundary(const Digest& digest, unsigned bits, std::uint32_t target) {
    if (bits == 0) return target == 0;
    std::uint64_t v = 0;
    for (int i = 0; i < 8 && i < digest.len; ++i)
        v |= static_cast<std::uint64_t>(digest.bytes[i]) << (8 * i);
    std::uint64_t mask =
        bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    return (v & mask) == target;
}

} // namespace chunkforge::hashcore
