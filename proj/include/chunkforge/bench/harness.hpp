#ifndef CHUNKFORGE_BENCH_HARNESS_HPP
#define CHUNKFORGE_BENCH_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "chunkforge/accelerant/pipeline.hpp"
#include "chunkforge/bench/workload.hpp"
#include "chunkforge/castore/store.hpp"
#include "chunkforge/chunker.hpp"

namespace chunkforge::bench {

enum class SystemMode {
    non_ca,     // no hashing, every block uploaded
    ca_cpu,     // inline single-worker hashing
    ca_accel,   // accelerant pipeline, cpu_parallel backend
    ca_infinite // accelerant pipeline, instant oracle backend
};

struct SystemConfig {
    SystemMode mode = SystemMode::ca_accel;
    ChunkingPolicy policy = ChunkingPolicy::fixed(1024 * 1024);
    accelerant::PipelineConfig pipeline;
    unsigned stripe_width = 4;
    std::size_t write_buffer_bytes = 4 * 1024 * 1024;
};

struct RunResult {
    std::uint32_t run = 0;
    double seconds = 0;
    std::uint64_t bytes_written = 0;
    double throughput_bps = 0;
    std::uint64_t wire_data_bytes = 0; // block payload bytes uploaded
    double mean_similarity = 0;
    std::uint64_t allocations_total = 0;
    std::uint64_t pool_hits = 0;
    bool aborted = false;
};

struct BenchReport {
    std::vector<RunResult> runs;

    // Mean over non-aborted runs.
    RunResult summary() const;
};

// Runs the workload through the configured store mode. With a manager
// address the store is reached over sockets; otherwise an in-process
// loopback deployment (memory manager + stripe_width memory nodes) is used.
BenchReport run_bench(const WorkloadSpec& spec, const SystemConfig& config,
                      unsigned repetitions,
                      std::optional<castore::NodeAddress> manager = {});

} // namespace chunkforge::bench

#endif
