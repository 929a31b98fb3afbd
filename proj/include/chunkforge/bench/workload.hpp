#ifndef CHUNKFORGE_BENCH_WORKLOAD_HPP
#define CHUNKFORGE_BENCH_WORKLOAD_HPP

#include <cstdint>
#include <vector>

namespace chunkforge::bench {

enum class WorkloadKind {
    different,           // independent pseudo-random files
    similar,             // one file repeated
    checkpoint_synthetic // base file plus mutated successive versions
};

struct EditMix {
    double insert = 0.34;
    double erase = 0.33;
    double overwrite = 0.33;
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::different;
    std::uint64_t file_size = 16 * 1024 * 1024;
    std::uint32_t file_count = 10;
    double mutation_rate = 0.01; // checkpoint only: fraction of bytes edited
    EditMix edit_mix;
    std::uint64_t seed = 42;
};

// Deterministic stream of workload files. The checkpoint workload derives
// each version from the previous one, so files must be taken in order.
class WorkloadStream {
public:
    explicit WorkloadStream(WorkloadSpec spec);

    bool done() const { return index_ >= spec_.file_count; }
    std::uint32_t index() const { return index_; }
    // Returns the next file's contents and advances.
    std::vector<std::uint8_t> next();

private:
    WorkloadSpec spec_;
    std::uint32_t index_ = 0;
    std::vector<std::uint8_t> current_;
};

// Convenience for tests: the whole file set at once.
std::vector<std::vector<std::uint8_t>> generate(const WorkloadSpec& spec);

std::vector<std::uint8_t> random_bytes(std::uint64_t size, std::uint64_t seed);

} // namespace chunkforge::bench

#endif
