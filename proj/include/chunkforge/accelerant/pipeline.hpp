#ifndef CHUNKFORGE_ACCELERANT_PIPELINE_HPP
#define CHUNKFORGE_ACCELERANT_PIPELINE_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "chunkforge/accelerant/buffer_pool.hpp"
#include "chunkforge/hashcore.hpp"

namespace chunkforge::accelerant {

enum class TaskKind { direct_hash_batch, window_hash_batch };

enum class BackendKind {
    cpu_parallel,   // compute realizes hashcore ops across a worker group
    instant_oracle, // zero simulated compute time, memoized digests
    simulated_delay // configurable per-stage virtual costs
};

struct ByteRange {
    std::uint64_t offset = 0;
    std::uint32_t length = 0;
};

struct WindowHit {
    std::uint64_t offset = 0;
    Digest digest;
    bool boundary = false;
};

struct TaskResult {
    std::vector<Digest> digests;    // direct_hash_batch: one per range
    std::vector<WindowHit> windows; // window_hash_batch
    bool failed = false;
    std::string error;
};

// A batched unit of accelerator work. The input buffer is returned to the
// pool when the task completes.
struct TaskSpec {
    TaskKind kind = TaskKind::direct_hash_batch;
    BufferHandle input;
    std::vector<ByteRange> ranges; // direct batch; empty means whole buffer
    hashcore::SegmentedHashParams segmented;
    hashcore::WindowHashParams window;
    // Runs on the device manager worker; must not block.
    std::function<void(const TaskResult&)> completion;
};

class Ticket {
public:
    Ticket() = default;

    // Blocks until completion; repeat waits return the cached result.
    const TaskResult& wait() const;
    bool valid() const { return state_ != nullptr; }

private:
    friend class Pipeline;
    struct State;
    explicit Ticket(std::shared_ptr<State> s) : state_(std::move(s)) {}
    std::shared_ptr<State> state_;
};

struct SimulatedCosts {
    double pre_ms = 0;
    double copy_in_ms = 0;
    double compute_ms = 0;
    double copy_out_ms = 0;
    double post_ms = 0;
};

struct PipelineConfig {
    unsigned device_count = 1;
    unsigned workers_per_device = 4;
    bool overlap = true;
    bool reuse = true;
    std::size_t pool_depth = 4;
    std::size_t max_buffer_bytes = 64 * 1024 * 1024;
    std::size_t idle_jobs = 32;
    BackendKind backend = BackendKind::cpu_parallel;
    SimulatedCosts simulated;
};

struct StageTimes {
    double pre = 0, copy_in = 0, compute = 0, copy_out = 0, post = 0;
};

struct PipelineStats {
    std::uint64_t allocations_total = 0;
    std::uint64_t pool_hits = 0;
    std::uint64_t submitted = 0;
    std::uint64_t completed = 0;
    std::uint64_t failed = 0;
    std::uint64_t outstanding_size = 0;
    std::uint64_t running_size = 0;
    std::uint64_t idle_size = 0;
    std::vector<std::uint64_t> per_device_tasks;
    StageTimes wall_stage_ms; // cumulative wall-clock per stage
    StageTimes sim_stage_ms;  // cumulative simulated per stage
    double sim_makespan_ms = 0;
    double wall_makespan_ms = 0;
    double overlap_occupancy = 0; // compute busy / simulated makespan
};

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Batch-oriented task pipeline: a master with idle/outstanding queues, one
// manager lane per device, round-robin dispatch, pooled staging buffers and
// optional copy-in/compute overlap.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    BufferHandle acquire(std::size_t size) { return pool_.acquire(size); }
    void release(BufferHandle&& h) { pool_.release(std::move(h)); }
    void warm_up(std::size_t bytes) { pool_.warm_up(bytes); }

    Ticket submit(TaskSpec spec);
    void drain(); // blocks until every submitted task has completed
    void shutdown();

    PipelineStats stats() const;
    const PipelineConfig& config() const { return cfg_; }

private:
    struct Job;
    struct Device;

    void dispatcher_loop();
    void device_ingress_loop(Device& dev);
    void device_compute_loop(Device& dev);
    void run_stages_sequential(Device& dev, std::unique_ptr<Job> job);
    void stage_pre_copy(Device& dev, Job& job);
    void stage_compute_post(Device& dev, std::unique_ptr<Job> job);
    TaskResult execute(Device& dev, Job& job);
    TaskResult compute_hashes(const Job& job) const;
    void recycle(std::unique_ptr<Job> job);
    std::unique_ptr<Job> take_idle();

    PipelineConfig cfg_;
    BufferPool pool_;

    mutable std::mutex mu_;
    std::condition_variable cv_outstanding_;
    std::condition_variable cv_drained_;
    bool stopping_ = false;
    std::uint64_t next_task_id_ = 1;
    std::uint64_t in_flight_ = 0;
    std::deque<std::unique_ptr<Job>> outstanding_; // FIFO
    std::vector<std::unique_ptr<Job>> idle_;
    unsigned rr_next_ = 0;

    // metrics
    std::uint64_t submitted_ = 0, completed_ = 0, failed_ = 0, running_ = 0;
    StageTimes wall_stage_ms_, sim_stage_ms_;
    double sim_makespan_ms_ = 0;
    double sim_compute_busy_ms_ = 0;
    std::chrono::steady_clock::time_point first_submit_{};
    std::chrono::steady_clock::time_point last_complete_{};
    bool any_submitted_ = false;

    // instant_oracle memo
    std::mutex memo_mu_;
    std::unordered_map<std::uint64_t, std::shared_ptr<const TaskResult>> memo_;

    std::vector<std::unique_ptr<Device>> devices_;
    std::thread dispatcher_;
};

} // namespace chunkforge::accelerant

#endif
