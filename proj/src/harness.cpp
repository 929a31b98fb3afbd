#include "chunkforge/bench/harness.hpp"

#include <chrono>
#include <iostream>

#include "chunkforge/netstore/client.hpp"

namespace chunkforge::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t uploaded_bytes(
    const std::vector<std::shared_ptr<castore::BlockStore>>& nodes) {
    std::uint64_t total = 0;
    for (const auto& n : nodes) total += n->counters().data_bytes_put;
    return total;
}

struct ModeEngine {
    std::unique_ptr<accelerant::Pipeline> pipeline;
    std::unique_ptr<castore::HashEngine> engine;
};

ModeEngine make_engine(const SystemConfig& config) {
    ModeEngine m;
    switch (config.mode) {
    case SystemMode::non_ca:
        m.engine = std::make_unique<castore::LocatorHashEngine>();
        break;
    case SystemMode::ca_cpu:
        m.engine = std::make_unique<castore::InlineHashEngine>(1);
        break;
    case SystemMode::ca_accel: {
        auto cfg = config.pipeline;
        cfg.backend = accelerant::BackendKind::cpu_parallel;
        m.pipeline = std::make_unique<accelerant::Pipeline>(cfg);
        m.engine = std::make_unique<castore::PipelineHashEngine>(*m.pipeline);
        break;
    }
    case SystemMode::ca_infinite: {
        auto cfg = config.pipeline;
        cfg.backend = accelerant::BackendKind::instant_oracle;
        m.pipeline = std::make_unique<accelerant::Pipeline>(cfg);
        m.engine = std::make_unique<castore::PipelineHashEngine>(*m.pipeline);
        break;
    }
    }
    return m;
}

} // namespace

RunResult BenchReport::summary() const {
    RunResult s;
    std::uint32_t counted = 0;
    for (const auto& r : runs) {
        if (r.aborted) continue;
        ++counted;
        s.seconds += r.seconds;
        s.bytes_written += r.bytes_written;
        s.throughput_bps += r.throughput_bps;
        s.wire_data_bytes += r.wire_data_bytes;
        s.mean_similarity += r.mean_similarity;
        s.allocations_total += r.allocations_total;
        s.pool_hits += r.pool_hits;
    }
    if (counted > 0) {
        s.run = counted;
        s.seconds /= counted;
        s.bytes_written /= counted;
        s.throughput_bps /= counted;
        s.wire_data_bytes /= counted;
        s.mean_similarity /= counted;
        s.allocations_total /= counted;
        s.pool_hits /= counted;
    }
    return s;
}

BenchReport run_bench(const WorkloadSpec& spec, const SystemConfig& config,
                      unsigned repetitions,
                      std::optional<castore::NodeAddress> manager) {
    BenchReport report;
    ModeEngine mode = make_engine(config);

    for (unsigned run = 0; run < repetitions; ++run) {
        RunResult result;
        result.run = run + 1;

        // fresh deployment per run; the pipeline (and its warmed pool)
        // persists across runs
        std::unique_ptr<castore::MemoryMetadataService> local_meta;
        std::vector<std::shared_ptr<castore::BlockStore>> nodes;
        netstore::RemoteStore remote;
        castore::Store* store = nullptr;
        std::unique_ptr<castore::Store> local_store;

        castore::StoreConfig scfg;
        scfg.stripe_width = config.stripe_width;
        scfg.write_buffer_bytes = config.write_buffer_bytes;
        scfg.digest_params = config.policy.digest_params;
        scfg.verify_reads = config.mode != SystemMode::non_ca;

        try {
            if (manager) {
                remote = netstore::connect_store(*manager, scfg);
                store = remote.store.get();
                nodes = remote.nodes;
            } else {
                local_meta = std::make_unique<castore::MemoryMetadataService>();
                const bool verify = config.mode != SystemMode::non_ca;
                for (unsigned i = 0; i < config.stripe_width; ++i)
                    nodes.push_back(std::make_shared<castore::MemoryBlockStore>(
                        config.policy.digest_params, verify));
                local_store = std::make_unique<castore::Store>(*local_meta,
                                                               nodes, scfg);
                store = local_store.get();
            }

            const std::uint64_t wire_before = uploaded_bytes(nodes);
            auto stats_before = mode.pipeline
                                    ? mode.pipeline->stats()
                                    : accelerant::PipelineStats{};

            WorkloadStream stream(spec);
            double similarity_sum = 0;
            std::uint32_t commits = 0;

            const auto t0 = Clock::now();
            while (!stream.done()) {
                const std::uint32_t idx = stream.index();
                auto data = stream.next();
                // different files get distinct ids; similar/checkpoint
                // workloads write successive versions of one file
                std::string file_id = "bench/run" + std::to_string(run);
                if (spec.kind == WorkloadKind::different)
                    file_id += "/file" + std::to_string(idx);
                if (manager) file_id += "@r" + std::to_string(run);

                auto session =
                    store->begin_write(file_id, config.policy, *mode.engine);
                constexpr std::size_t kWriteCall = 1024 * 1024;
                for (std::size_t off = 0; off < data.size();
                     off += kWriteCall) {
                    const std::size_t n =
                        std::min(kWriteCall, data.size() - off);
                    session->write({data.data() + off, n});
                }
                auto commit = session->commit();
                // similarity is defined between consecutive versions, so the
                // initial version of a file does not contribute
                if (commit.map.version > 1) {
                    similarity_sum += commit.report.similarity_ratio();
                    ++commits;
                }
                result.bytes_written += data.size();
            }
            result.seconds =
                std::chrono::duration<double>(Clock::now() - t0).count();
            result.throughput_bps =
                result.seconds > 0 ? result.bytes_written / result.seconds : 0;
            result.wire_data_bytes = uploaded_bytes(nodes) - wire_before;
            result.mean_similarity =
                commits > 0 ? similarity_sum / commits : 0;
            if (mode.pipeline) {
                auto st = mode.pipeline->stats();
                result.allocations_total =
                    st.allocations_total - stats_before.allocations_total;
                result.pool_hits = st.pool_hits - stats_before.pool_hits;
            }
        } catch (const std::exception& e) {
            result.aborted = true;
            std::cerr << "warning: run " << run << " aborted: " << e.what()
                      << " (excluded from averages)\n";
        }
        report.runs.push_back(result);
    }
    return report;
}

} // namespace chunkforge::bench
