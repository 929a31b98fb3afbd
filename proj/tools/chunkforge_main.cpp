// chunkforge command-line tool.
//
// Subcommands:
//   serve-manager   run the metadata manager (block-map CAS + node registry)
//   serve-node      run a storage node and register it with the manager
//   put             upload one file through a manager deployment
//   get             download a file and write it to disk
//   bench           run the measurement harness and emit a CSV report
//
// Every flag can also be set through an environment variable named
// CHUNKFORGE_<FLAG> (dashes become underscores, upper-cased; e.g.
// --boundary-bits -> CHUNKFORGE_BOUNDARY_BITS) or through a key=value
// configuration file passed with --config.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "chunkforge/accelerant/pipeline.hpp"
#include "chunkforge/bench/harness.hpp"
#include "chunkforge/bench/report.hpp"
#include "chunkforge/castore/store.hpp"
#include "chunkforge/chunker.hpp"
#include "chunkforge/netstore/client.hpp"
#include "chunkforge/netstore/server.hpp"

namespace cf = chunkforge;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void wait_for_signal() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

cf::castore::NodeAddress parse_address(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw CLI::ValidationError("address", "expected host:port, got '" +
                                                   text + "'");
    cf::castore::NodeAddress addr;
    addr.host = text.substr(0, colon);
    const int port = std::stoi(text.substr(colon + 1));
    if (port <= 0 || port > 65535)
        throw CLI::ValidationError("address", "port out of range in '" +
                                                  text + "'");
    addr.port = static_cast<std::uint16_t>(port);
    return addr;
}

// Flags shared by put/get/bench describing the chunking policy, the hashing
// mode and the pipeline shape.
struct CommonOptions {
    std::string policy = "cdc";
    std::uint64_t block_size = 1024 * 1024;
    std::uint64_t window = 48;
    unsigned boundary_bits = 13;
    std::uint32_t boundary_target = 0;
    std::uint64_t stride = 1;
    std::uint64_t min_chunk = 256 * 1024;
    std::uint64_t max_chunk = 4 * 1024 * 1024;

    std::string mode = "cacpu";
    unsigned devices = 1;
    unsigned workers = 4;
    std::string overlap = "on";
    std::string reuse = "on";
    std::uint64_t batch = 32;
    unsigned stripe = 4;
    std::string manager;
};

std::string env_name(std::string flag) {
    std::string out = "CHUNKFORGE_";
    for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    return out;
}

CLI::Option* add_flag(CLI::App& app, const std::string& name, auto& target,
                      const std::string& help) {
    return app.add_option("--" + name, target, help)->envname(env_name(name));
}

void add_common_options(CLI::App& app, CommonOptions& o) {
    add_flag(app, "policy", o.policy, "Chunking policy: fixed|cdc")
        ->check(CLI::IsMember({"fixed", "cdc"}));
    add_flag(app, "block-size", o.block_size,
             "Fixed policy: block size in bytes")
        ->transform(CLI::AsSizeValue(false));
    add_flag(app, "window", o.window, "Sliding-window width in bytes");
    add_flag(app, "boundary-bits", o.boundary_bits,
             "Boundary predicate: low bits compared against the target")
        ->check(CLI::Range(0u, 32u));
    add_flag(app, "boundary-target", o.boundary_target,
             "Boundary predicate target value");
    add_flag(app, "stride", o.stride, "Window evaluation stride in bytes");
    add_flag(app, "min-chunk", o.min_chunk, "Minimum chunk size in bytes")
        ->transform(CLI::AsSizeValue(false));
    add_flag(app, "max-chunk", o.max_chunk, "Maximum chunk size in bytes")
        ->transform(CLI::AsSizeValue(false));

    add_flag(app, "mode", o.mode,
             "Hashing mode: nonca|cacpu|caaccel|cainf")
        ->check(CLI::IsMember({"nonca", "cacpu", "caaccel", "cainf"}));
    add_flag(app, "devices", o.devices, "Pipeline: device count");
    add_flag(app, "workers", o.workers, "Pipeline: workers per device");
    add_flag(app, "overlap", o.overlap,
             "Pipeline: overlap ingress with compute (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    add_flag(app, "reuse", o.reuse, "Pipeline: reuse pooled buffers (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    add_flag(app, "batch", o.batch,
             "Pipeline: jobs admitted per device queue");
    add_flag(app, "stripe", o.stripe, "Store: stripe width (node count)");
    add_flag(app, "manager", o.manager, "Manager address as host:port");
}

cf::ChunkingPolicy make_policy(const CommonOptions& o) {
    if (o.policy == "fixed")
        return cf::ChunkingPolicy::fixed(o.block_size);
    cf::hashcore::WindowHashParams wp;
    wp.window = o.window;
    wp.stride = o.stride;
    wp.boundary_bits = o.boundary_bits;
    wp.boundary_target = o.boundary_target;
    return cf::ChunkingPolicy::content_defined(wp, o.min_chunk, o.max_chunk);
}

cf::bench::SystemMode make_mode(const std::string& mode) {
    if (mode == "nonca") return cf::bench::SystemMode::non_ca;
    if (mode == "cacpu") return cf::bench::SystemMode::ca_cpu;
    if (mode == "caaccel") return cf::bench::SystemMode::ca_accel;
    return cf::bench::SystemMode::ca_infinite;
}

cf::accelerant::PipelineConfig make_pipeline_config(const CommonOptions& o) {
    cf::accelerant::PipelineConfig cfg;
    cfg.device_count = o.devices;
    cfg.workers_per_device = o.workers;
    cfg.overlap = o.overlap == "on";
    cfg.reuse = o.reuse == "on";
    cfg.idle_jobs = o.batch;
    cfg.backend = o.mode == "cainf"
                      ? cf::accelerant::BackendKind::instant_oracle
                      : cf::accelerant::BackendKind::cpu_parallel;
    return cfg;
}

// Engine selection for put/get; bench builds its own per-run.
struct EngineBundle {
    std::unique_ptr<cf::accelerant::Pipeline> pipeline;
    std::unique_ptr<cf::castore::HashEngine> engine;
    bool locator_digests = false;
};

EngineBundle make_engine(const CommonOptions& o) {
    EngineBundle b;
    const auto mode = make_mode(o.mode);
    switch (mode) {
    case cf::bench::SystemMode::non_ca:
        b.engine = std::make_unique<cf::castore::LocatorHashEngine>();
        b.locator_digests = true;
        break;
    case cf::bench::SystemMode::ca_cpu:
        b.engine = std::make_unique<cf::castore::InlineHashEngine>(1);
        break;
    default:
        b.pipeline = std::make_unique<cf::accelerant::Pipeline>(
            make_pipeline_config(o));
        b.engine =
            std::make_unique<cf::castore::PipelineHashEngine>(*b.pipeline);
        break;
    }
    return b;
}

cf::netstore::RemoteStore connect(const CommonOptions& o,
                                  bool verify_reads) {
    if (o.manager.empty())
        throw CLI::ValidationError("--manager", "a manager address is required");
    cf::castore::StoreConfig cfg;
    cfg.stripe_width = o.stripe;
    cfg.verify_reads = verify_reads;
    return cf::netstore::connect_store(parse_address(o.manager), cfg);
}

int run_serve_manager(std::uint16_t port) {
    cf::netstore::ManagerServer server(port);
    std::cout << "manager listening on port " << server.port() << std::endl;
    wait_for_signal();
    return 0;
}

int run_serve_node(std::uint16_t port, const std::string& manager,
                   const std::string& host, std::uint64_t capacity) {
    cf::netstore::NodeServer::Options opts;
    opts.port = port;
    opts.advertised_host = host;
    opts.capacity_bytes = capacity;
    cf::netstore::NodeServer node(opts);
    std::cout << "node listening on port " << node.port() << std::endl;
    if (!manager.empty()) {
        node.register_with(parse_address(manager));
        std::cout << "registered with manager " << manager << std::endl;
    }
    wait_for_signal();
    return 0;
}

int run_put(const CommonOptions& o, const std::string& file_id,
            const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << path << std::endl;
        return 1;
    }
    std::vector<char> data((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());

    auto bundle = make_engine(o);
    // locator digests are not content hashes, so reads cannot verify them
    auto remote = connect(o, /*verify_reads=*/!bundle.locator_digests);
    auto session =
        remote.store->begin_write(file_id, make_policy(o), *bundle.engine);
    session->write({reinterpret_cast<const std::uint8_t*>(data.data()),
                    data.size()});
    const auto result = session->commit();

    std::cout << "committed " << file_id << " version "
              << result.map.version << ": " << result.map.blocks.size()
              << " chunks, " << result.uploaded_bytes
              << " bytes uploaded, similarity "
              << result.report.similarity_ratio() << std::endl;
    return 0;
}

int run_get(const CommonOptions& o, const std::string& file_id,
            const std::string& out_path) {
    auto remote = connect(o, /*verify_reads=*/o.mode != "nonca");
    const auto data = remote.store->read(file_id);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << out_path << std::endl;
        return 1;
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    std::cout << "wrote " << data.size() << " bytes to " << out_path
              << std::endl;
    return 0;
}

int run_bench_cmd(const CommonOptions& o, const std::string& workload,
                  std::uint64_t file_size, std::uint32_t file_count,
                  double mutation_rate, std::uint64_t seed, unsigned runs,
                  const std::string& out_path) {
    cf::bench::WorkloadSpec spec;
    if (workload == "different")
        spec.kind = cf::bench::WorkloadKind::different;
    else if (workload == "similar")
        spec.kind = cf::bench::WorkloadKind::similar;
    else
        spec.kind = cf::bench::WorkloadKind::checkpoint_synthetic;
    spec.file_size = file_size;
    spec.file_count = file_count;
    spec.mutation_rate = mutation_rate;
    spec.seed = seed;

    cf::bench::SystemConfig cfg;
    cfg.mode = make_mode(o.mode);
    cfg.policy = make_policy(o);
    cfg.pipeline = make_pipeline_config(o);
    cfg.stripe_width = o.stripe;

    std::optional<cf::castore::NodeAddress> manager;
    if (!o.manager.empty()) manager = parse_address(o.manager);

    const auto report = cf::bench::run_bench(spec, cfg, runs, manager);
    const auto csv = cf::bench::report_csv(report);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        cf::bench::write_report_csv(report, out_path);
        std::cout << "report written to " << out_path << std::endl;
    }
    const auto mean = report.summary();
    std::cout << "mean throughput "
              << mean.throughput_bps / (1024.0 * 1024.0)
              << " MB/s, wire bytes " << mean.wire_data_bytes
              << ", similarity " << mean.mean_similarity << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chunkforge: content-addressable storage with batched "
                 "hash offload"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Configuration file with key=value lines");

    auto* serve_manager =
        app.add_subcommand("serve-manager", "Run the metadata manager");
    std::uint16_t manager_port = 9500;
    serve_manager->add_option("--port", manager_port, "Listen port")
        ->envname("CHUNKFORGE_PORT");

    auto* serve_node =
        app.add_subcommand("serve-node", "Run a storage node");
    std::uint16_t node_port = 0;
    std::string node_manager;
    std::string node_host = "127.0.0.1";
    std::uint64_t node_capacity = 0;
    serve_node->add_option("--port", node_port, "Listen port (0 = any)")
        ->envname("CHUNKFORGE_PORT");
    serve_node
        ->add_option("--manager", node_manager,
                     "Manager address to register with (host:port)")
        ->envname("CHUNKFORGE_MANAGER");
    serve_node
        ->add_option("--host", node_host, "Host advertised to the manager")
        ->envname("CHUNKFORGE_HOST");
    serve_node
        ->add_option("--capacity", node_capacity,
                     "Capacity in bytes (0 = unlimited)")
        ->transform(CLI::AsSizeValue(false))
        ->envname("CHUNKFORGE_CAPACITY");

    auto* put = app.add_subcommand("put", "Upload a file");
    CommonOptions put_opts;
    std::string put_id, put_path;
    add_common_options(*put, put_opts);
    put->add_option("--id", put_id, "File id")->required();
    put->add_option("path", put_path, "Local file to upload")->required();

    auto* get = app.add_subcommand("get", "Download a file");
    CommonOptions get_opts;
    std::string get_id, get_out = "-";
    add_common_options(*get, get_opts);
    get->add_option("--id", get_id, "File id")->required();
    get->add_option("--out", get_out, "Output path")
        ->required()
        ->envname("CHUNKFORGE_OUT");

    auto* bench = app.add_subcommand("bench", "Run the measurement harness");
    CommonOptions bench_opts;
    std::string workload = "different";
    std::uint64_t file_size = 16 * 1024 * 1024;
    std::uint32_t file_count = 10;
    double mutation_rate = 0.01;
    std::uint64_t seed = 42;
    unsigned runs = 10;
    std::string out_path;
    add_common_options(*bench, bench_opts);
    bench
        ->add_option("--workload", workload,
                     "Workload: different|similar|checkpoint")
        ->check(CLI::IsMember({"different", "similar", "checkpoint"}))
        ->envname("CHUNKFORGE_WORKLOAD");
    bench->add_option("--file-size", file_size, "Bytes per workload file")
        ->transform(CLI::AsSizeValue(false))
        ->envname("CHUNKFORGE_FILE_SIZE");
    bench->add_option("--files", file_count, "Files per run")
        ->envname("CHUNKFORGE_FILES");
    bench
        ->add_option("--mutation-rate", mutation_rate,
                     "Checkpoint workload: fraction of bytes edited")
        ->check(CLI::Range(0.0, 1.0))
        ->envname("CHUNKFORGE_MUTATION_RATE");
    bench->add_option("--seed", seed, "Workload random seed")
        ->envname("CHUNKFORGE_SEED");
    bench->add_option("--runs", runs, "Repetitions")
        ->envname("CHUNKFORGE_RUNS");
    bench->add_option("--out", out_path, "CSV output path ('-' for stdout)")
        ->envname("CHUNKFORGE_OUT");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve_manager->parsed()) return run_serve_manager(manager_port);
        if (serve_node->parsed())
            return run_serve_node(node_port, node_manager, node_host,
                                  node_capacity);
        if (put->parsed()) return run_put(put_opts, put_id, put_path);
        if (get->parsed()) return run_get(get_opts, get_id, get_out);
        return run_bench_cmd(bench_opts, workload, file_size, file_count,
                             mutation_rate, seed, runs, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
