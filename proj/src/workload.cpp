#include "chunkforge/bench/workload.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>

namespace chunkforge::bench {

namespace {

constexpr std::size_t kMaxEditBytes = 4096;

void apply_edits(std::vector<std::uint8_t>& data, const WorkloadSpec& spec,
                 std::mt19937_64& rng) {
    if (data.empty() || spec.mutation_rate <= 0) return;

    const double total = spec.edit_mix.insert + spec.edit_mix.erase +
                         spec.edit_mix.overwrite;
    if (total <= 0) throw std::invalid_argument("edit mix sums to zero");

    std::uint64_t budget = static_cast<std::uint64_t>(
        spec.mutation_rate * static_cast<double>(data.size()));
    std::uniform_real_distribution<double> pick(0.0, total);
    std::uniform_int_distribution<std::size_t> edit_len(1, kMaxEditBytes);

    while (budget > 0) {
        std::size_t len = std::min<std::uint64_t>(edit_len(rng), budget);
        std::size_t pos =
            std::uniform_int_distribution<std::size_t>(0, data.size() - 1)(rng);
        const double what = pick(rng);

        if (what < spec.edit_mix.insert) {
            std::vector<std::uint8_t> patch(len);
            for (auto& b : patch) b = static_cast<std::uint8_t>(rng());
            data.insert(data.begin() + static_cast<std::ptrdiff_t>(pos),
                        patch.begin(), patch.end());
        } else if (what < spec.edit_mix.insert + spec.edit_mix.erase) {
            len = std::min(len, data.size() - pos);
            data.erase(data.begin() + static_cast<std::ptrdiff_t>(pos),
                       data.begin() + static_cast<std::ptrdiff_t>(pos + len));
            if (data.empty()) return;
        } else {
            len = std::min(len, data.size() - pos);
            for (std::size_t i = 0; i < len; ++i)
                data[pos + i] = static_cast<std::uint8_t>(rng());
        }
        budget -= len;
    }
}

} // namespace

std::vector<std::uint8_t> random_bytes(std::uint64_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> data(size);
    std::size_t i = 0;
    for (; i + 8 <= data.size(); i += 8) {
        std::uint64_t v = rng();
        std::memcpy(data.data() + i, &v, 8);
    }
    for (; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(rng());
    return data;
}

WorkloadStream::WorkloadStream(WorkloadSpec spec) : spec_(spec) {
    if (spec_.mutation_rate < 0 || spec_.mutation_rate > 1)
        throw std::invalid_argument("mutation_rate must be in [0,1]");
}

std::vector<std::uint8_t> WorkloadStream::next() {
    if (done()) throw std::out_of_range("workload exhausted");

    switch (spec_.kind) {
    case WorkloadKind::different:
        current_ = random_bytes(spec_.file_size, spec_.seed + 0x9e37 * index_);
        break;
    case WorkloadKind::similar:
        if (index_ == 0) current_ = random_bytes(spec_.file_size, spec_.seed);
        break;
    case WorkloadKind::checkpoint_synthetic:
        if (index_ == 0) {
            current_ = random_bytes(spec_.file_size, spec_.seed);
        } else {
            std::mt19937_64 rng(spec_.seed ^ (0xc0ffee + index_));
            apply_edits(current_, spec_, rng);
        }
        break;
    }
    ++index_;
    return current_;
}

std::vector<std::vector<std::uint8_t>> generate(const WorkloadSpec& spec) {
    WorkloadStream stream(spec);
    std::vector<std::vector<std::uint8_t>> files;
    files.reserve(spec.file_count);
    while (!stream.done()) files.push_back(stream.next());
    return files;
}

} // namespace chunkforge::bench
