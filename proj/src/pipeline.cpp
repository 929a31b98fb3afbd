#include "chunkforge/accelerant/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

namespace chunkforge::accelerant {

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

std::uint64_t fingerprint_bytes(std::uint64_t h,
                                std::span<const std::uint8_t> data) {
    std::size_t i = 0;
    for (; i + 8 <= data.size(); i += 8) {
        std::uint64_t v;
        std::memcpy(&v, data.data() + i, 8);
        h = mix64(h, v);
    }
    std::uint64_t tail = 0;
    for (; i < data.size(); ++i) tail = (tail << 8) | data[i];
    return mix64(h, tail ^ data.size());
}

} // namespace

struct Ticket::State {
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    TaskResult result;
};

const TaskResult& Ticket::wait() const {
    if (!state_) throw PipelineError("wait on an empty ticket");
    std::unique_lock lock(state_->mu);
    state_->cv.wait(lock, [&] { return state_->done; });
    return state_->result;
}

struct Pipeline::Job {
    std::uint64_t id = 0;
    TaskSpec spec;
    std::shared_ptr<Ticket::State> ticket;
    std::vector<std::uint8_t> staging; // device-side copy, reused on recycle
    double sim_copy_end = 0;
    StageTimes wall;
    StageTimes sim;
};

struct Pipeline::Device {
    unsigned index = 0;
    std::mutex mu;
    std::condition_variable cv_inbox;
    std::condition_variable cv_staged;
    std::deque<std::unique_ptr<Job>> inbox;
    std::deque<std::unique_ptr<Job>> staged;
    bool stop_ingress = false;
    bool stop_compute = false;
    std::uint64_t tasks_done = 0;
    // per-lane virtual timelines (ms since pipeline start)
    double copy_free = 0;
    double comp_free = 0;
    std::thread ingress;
    std::thread compute;
};

Pipeline::Pipeline(PipelineConfig cfg)
    : cfg_(cfg),
      pool_(cfg.pool_depth, cfg.max_buffer_bytes, cfg.reuse) {
    if (cfg_.device_count == 0) throw PipelineError("device_count must be >= 1");
    if (cfg_.workers_per_device == 0) cfg_.workers_per_device = 1;

    for (std::size_t i = 0; i < cfg_.idle_jobs; ++i)
        idle_.push_back(std::make_unique<Job>());

    for (unsigned d = 0; d < cfg_.device_count; ++d) {
        auto dev = std::make_unique<Device>();
        dev->index = d;
        devices_.push_back(std::move(dev));
    }
    for (auto& dev : devices_) {
        Device* p = dev.get();
        p->ingress = std::thread([this, p] { device_ingress_loop(*p); });
        if (cfg_.overlap)
            p->compute = std::thread([this, p] { device_compute_loop(*p); });
    }
    dispatcher_ = std::thread([this] { dispatcher_loop(); });
}

Pipeline::~Pipeline() { shutdown(); }

std::unique_ptr<Pipeline::Job> Pipeline::take_idle() {
    if (!idle_.empty()) {
        auto job = std::move(idle_.back());
        idle_.pop_back();
        return job;
    }
    return std::make_unique<Job>();
}

void Pipeline::recycle(std::unique_ptr<Job> job) {
    job->spec = TaskSpec{};
    job->ticket.reset();
    job->wall = StageTimes{};
    job->sim = StageTimes{};
    std::lock_guard lock(mu_);
    if (idle_.size() < cfg_.idle_jobs) idle_.push_back(std::move(job));
}

Ticket Pipeline::submit(TaskSpec spec) {
    if (!spec.input.valid() || spec.input.used() == 0)
        throw PipelineError("task input must be a non-empty buffer");

    auto state = std::make_shared<Ticket::State>();
    {
        std::lock_guard lock(mu_);
        if (stopping_) throw PipelineError("pipeline is shut down");
        auto job = take_idle();
        job->id = next_task_id_++;
        job->spec = std::move(spec);
        job->ticket = state;
        if (!any_submitted_) {
            any_submitted_ = true;
            first_submit_ = Clock::now();
        }
        ++submitted_;
        ++in_flight_;
        outstanding_.push_back(std::move(job));
    }
    cv_outstanding_.notify_one();
    return Ticket(state);
}

void Pipeline::dispatcher_loop() {
    for (;;) {
        std::unique_ptr<Job> job;
        Device* dev = nullptr;
        {
            std::unique_lock lock(mu_);
            cv_outstanding_.wait(
                lock, [&] { return stopping_ || !outstanding_.empty(); });
            if (outstanding_.empty()) return; // stopping and drained
            job = std::move(outstanding_.front());
            outstanding_.pop_front();
            dev = devices_[rr_next_].get();
            rr_next_ = (rr_next_ + 1) % cfg_.device_count;
            ++running_;
        }
        {
            std::lock_guard dlock(dev->mu);
            dev->inbox.push_back(std::move(job));
        }
        dev->cv_inbox.notify_one();
    }
}

void Pipeline::device_ingress_loop(Device& dev) {
    for (;;) {
        std::unique_ptr<Job> job;
        {
            std::unique_lock lock(dev.mu);
            dev.cv_inbox.wait(
                lock, [&] { return dev.stop_ingress || !dev.inbox.empty(); });
            if (dev.inbox.empty()) return;
            job = std::move(dev.inbox.front());
            dev.inbox.pop_front();
        }
        if (cfg_.overlap) {
            stage_pre_copy(dev, *job);
            {
                std::lock_guard lock(dev.mu);
                dev.staged.push_back(std::move(job));
            }
            dev.cv_staged.notify_one();
        } else {
            run_stages_sequential(dev, std::move(job));
        }
    }
}

void Pipeline::device_compute_loop(Device& dev) {
    for (;;) {
        std::unique_ptr<Job> job;
        {
            std::unique_lock lock(dev.mu);
            dev.cv_staged.wait(
                lock, [&] { return dev.stop_compute || !dev.staged.empty(); });
            if (dev.staged.empty()) return;
            job = std::move(dev.staged.front());
            dev.staged.pop_front();
        }
        stage_compute_post(dev, std::move(job));
    }
}

// pre + copy_in on the copy lane; with overlap this runs concurrently with
// the compute of the device's previous task
void Pipeline::stage_pre_copy(Device& dev, Job& job) {
    const SimulatedCosts& sc = cfg_.simulated;

    auto t0 = Clock::now();
    const bool device_copy = cfg_.backend == BackendKind::simulated_delay;
    if (device_copy) job.staging.resize(job.spec.input.used());
    else job.staging.clear(); // "device memory" is the host buffer itself
    job.wall.pre = ms_since(t0);
    job.sim.pre = sc.pre_ms;

    t0 = Clock::now();
    if (device_copy)
        std::memcpy(job.staging.data(), job.spec.input.data(),
                    job.spec.input.used());
    job.wall.copy_in = ms_since(t0);
    job.sim.copy_in = sc.copy_in_ms;

    // virtual copy-lane bookkeeping
    std::lock_guard lock(dev.mu);
    dev.copy_free += sc.pre_ms + sc.copy_in_ms;
    job.sim_copy_end = dev.copy_free;
}

void Pipeline::run_stages_sequential(Device& dev, std::unique_ptr<Job> job) {
    stage_pre_copy(dev, *job);
    {
        // single lane: compute may not start before the copy lane is free
        std::lock_guard lock(dev.mu);
        dev.comp_free = std::max(dev.comp_free, dev.copy_free);
    }
    stage_compute_post(dev, std::move(job));
}

void Pipeline::stage_compute_post(Device& dev, std::unique_ptr<Job> job) {
    const SimulatedCosts& sc = cfg_.simulated;

    auto t0 = Clock::now();
    TaskResult result = execute(dev, *job);
    job->wall.compute = ms_since(t0);
    job->sim.compute = sc.compute_ms;

    t0 = Clock::now();
    job->ticket->result = std::move(result); // copy-out into the caller buffer
    job->wall.copy_out = ms_since(t0);
    job->sim.copy_out = sc.copy_out_ms;

    double comp_end;
    {
        std::lock_guard lock(dev.mu);
        double start = std::max(dev.comp_free, job->sim_copy_end);
        comp_end = start + sc.compute_ms + sc.copy_out_ms + sc.post_ms;
        dev.comp_free = comp_end;
        ++dev.tasks_done;
        if (!cfg_.overlap) dev.copy_free = comp_end;
    }

    t0 = Clock::now();
    bool failed = job->ticket->result.failed;
    // Return the staging buffer before publishing completion so a caller
    // pacing on ticket waits sees the buffer back in the pool.
    pool_.release(std::move(job->spec.input));
    {
        std::lock_guard lock(job->ticket->mu);
        job->ticket->done = true;
    }
    job->ticket->cv.notify_all();
    if (job->spec.completion) job->spec.completion(job->ticket->result);
    job->wall.post = ms_since(t0);
    job->sim.post = sc.post_ms;

    {
        std::lock_guard lock(mu_);
        ++completed_;
        if (failed) ++failed_;
        --running_;
        --in_flight_;
        last_complete_ = Clock::now();
        sim_makespan_ms_ = std::max(sim_makespan_ms_, comp_end);
        sim_compute_busy_ms_ += sc.compute_ms;
        auto add = [](StageTimes& acc, const StageTimes& t) {
            acc.pre += t.pre;
            acc.copy_in += t.copy_in;
            acc.compute += t.compute;
            acc.copy_out += t.copy_out;
            acc.post += t.post;
        };
        add(wall_stage_ms_, job->wall);
        add(sim_stage_ms_, job->sim);
    }
    cv_drained_.notify_all();
    recycle(std::move(job));
}

TaskResult Pipeline::execute(Device& dev, Job& job) {
    try {
        switch (cfg_.backend) {
        case BackendKind::cpu_parallel:
        case BackendKind::simulated_delay:
            return compute_hashes(job);
        case BackendKind::instant_oracle: {
            std::uint64_t fp = mix64(0x5eed1234abcd77ffull, 1);
            fp = mix64(fp, static_cast<std::uint64_t>(job.spec.kind));
            if (job.spec.kind == TaskKind::direct_hash_batch) {
                fp = mix64(fp, job.spec.segmented.segment_size);
            } else {
                fp = mix64(fp, job.spec.window.window);
                fp = mix64(fp, job.spec.window.stride);
                fp = mix64(fp, job.spec.window.boundary_bits);
                fp = mix64(fp, job.spec.window.boundary_target);
            }
            for (const auto& r : job.spec.ranges)
                fp = mix64(fp, (r.offset << 24) ^ r.length);
            fp = fingerprint_bytes(fp, job.staging.empty()
                                           ? job.spec.input.contents()
                                           : std::span<const std::uint8_t>{
                                                 job.staging.data(),
                                                 job.staging.size()});
            {
                std::lock_guard lock(memo_mu_);
                auto it = memo_.find(fp);
                if (it != memo_.end()) return *it->second;
            }
            auto result = std::make_shared<TaskResult>(compute_hashes(job));
            {
                std::lock_guard lock(memo_mu_);
                memo_.emplace(fp, result);
            }
            return *result;
        }
        }
        throw PipelineError("unknown backend");
    } catch (const std::exception& e) {
        (void)dev;
        TaskResult r;
        r.failed = true;
        r.error = e.what();
        return r;
    }
}

TaskResult Pipeline::compute_hashes(const Job& job) const {
    TaskResult r;
    const std::span<const std::uint8_t> data =
        job.staging.empty()
            ? job.spec.input.contents()
            : std::span<const std::uint8_t>{job.staging.data(),
                                            job.staging.size()};
    const unsigned workers = cfg_.workers_per_device;

    if (job.spec.kind == TaskKind::direct_hash_batch) {
        std::vector<ByteRange> ranges = job.spec.ranges;
        if (ranges.empty())
            ranges.push_back({0, static_cast<std::uint32_t>(data.size())});
        for (const auto& range : ranges) {
            if (range.offset + range.length > data.size())
                throw PipelineError("task range exceeds input buffer");
            r.digests.push_back(hashcore::direct_hash(
                data.subspan(range.offset, range.length), job.spec.segmented,
                workers));
        }
    } else {
        auto hashes = hashcore::window_hashes(data, job.spec.window, workers);
        r.windows.reserve(hashes.size());
        for (auto& wh : hashes)
            r.windows.push_back({wh.offset, wh.digest,
                                 hashcore::is_boundary(wh.digest,
                                                       job.spec.window)});
    }
    return r;
}

void Pipeline::drain() {
    std::unique_lock lock(mu_);
    cv_drained_.wait(lock, [&] { return in_flight_ == 0; });
}

void Pipeline::shutdown() {
    {
        std::lock_guard lock(mu_);
        if (stopping_) return;
        stopping_ = true;
    }
    cv_outstanding_.notify_all();
    drain();
    if (dispatcher_.joinable()) dispatcher_.join();
    for (auto& dev : devices_) {
        {
            std::lock_guard lock(dev->mu);
            dev->stop_ingress = true;
        }
        dev->cv_inbox.notify_all();
        if (dev->ingress.joinable()) dev->ingress.join();
        {
            std::lock_guard lock(dev->mu);
            dev->stop_compute = true;
        }
        dev->cv_staged.notify_all();
        if (dev->compute.joinable()) dev->compute.join();
    }
    pool_.shutdown();
}

PipelineStats Pipeline::stats() const {
    PipelineStats s;
    auto ps = pool_.stats();
    s.allocations_total = ps.allocations_total;
    s.pool_hits = ps.pool_hits;
    {
        std::lock_guard lock(mu_);
        s.submitted = submitted_;
        s.completed = completed_;
        s.failed = failed_;
        s.outstanding_size = outstanding_.size();
        s.running_size = running_;
        s.idle_size = idle_.size();
        s.wall_stage_ms = wall_stage_ms_;
        s.sim_stage_ms = sim_stage_ms_;
        s.sim_makespan_ms = sim_makespan_ms_;
        if (any_submitted_ && completed_ > 0)
            s.wall_makespan_ms =
                std::chrono::duration<double, std::milli>(last_complete_ -
                                                          first_submit_)
                    .count();
        if (sim_makespan_ms_ > 0)
            s.overlap_occupancy = sim_compute_busy_ms_ / sim_makespan_ms_;
    }
    for (const auto& dev : devices_) {
        std::lock_guard lock(dev->mu);
        s.per_device_tasks.push_back(dev->tasks_done);
    }
    return s;
}

} // namespace chunkforge::accelerant
