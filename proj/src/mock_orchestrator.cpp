#include "warmslice/mock_orchestrator.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>

namespace warmslice {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

// Yield-spin to the deadline; long waits sleep the bulk first. Timer
// wakeups on a busy single-CPU host arrive 10-16 ms late, while a
// runnable yielding thread is rescheduled within microseconds, so the
// apply time stays off the timer path wherever the latency matters.
void precise_sleep_until(clock_type::time_point deadline) {
    const auto spin_margin = std::chrono::milliseconds(18);
    if (deadline - clock_type::now() > std::chrono::milliseconds(250))
        std::this_thread::sleep_until(deadline - spin_margin);
    while (clock_type::now() < deadline) std::this_thread::yield();
}

std::atomic<std::uint64_t> temp_counter{0};

void atomic_write(const fs::path& file, MilliCpu value) {
    const fs::path tmp =
        file.parent_path() /
        (file.filename().string() + ".tmp" + std::to_string(temp_counter.fetch_add(1)));
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << value.value << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);  // atomic within one filesystem
    if (ec) throw IoError("rename failed: " + ec.message());
}

}  // namespace

// The applier is a persistent thread: spawning one per patch adds
// scheduler noise right inside the measured window.
struct Container::Impl {
    std::string id;
    fs::path file;

    std::mutex mutex;
    std::condition_variable cv;
    struct Pending {
        MilliCpu target{1};
        clock_type::time_point deadline;
        bool immediate = false;
    };
    std::optional<Pending> pending;
    bool applying = false;
    bool shutdown = false;
    std::thread worker;

    ~Impl() {
        {
            std::lock_guard lock(mutex);
            shutdown = true;
        }
        cv.notify_all();
        if (worker.joinable()) worker.join();
    }

    void start_worker() {
        worker = std::thread([this] { run(); });
    }

    void run() {
        std::unique_lock lock(mutex);
        for (;;) {
            cv.wait(lock, [&] { return pending.has_value() || shutdown; });
            if (shutdown) return;
            const Pending job = *pending;
            pending.reset();
            applying = true;
            lock.unlock();
            if (!job.immediate) precise_sleep_until(job.deadline);
            atomic_write(file, job.target);
            lock.lock();
            applying = false;
            cv.notify_all();
        }
    }

    void submit(MilliCpu target, clock_type::time_point deadline, bool immediate) {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return !pending.has_value() && !applying; });
        pending = Pending{target, deadline, immediate};
        cv.notify_all();
    }

    void drain() {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return !pending.has_value() && !applying; });
    }
};

Container::Container(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Container::Container(Container&&) noexcept = default;
Container::~Container() = default;

Container Container::create(const std::string& id, MilliCpu initial, const fs::path& workdir) {
    std::error_code ec;
    fs::create_directories(workdir, ec);
    const fs::path file = workdir / (id + ".cpu.max");
    if (fs::exists(file)) throw AlreadyExistsError("container already exists: " + id);
    auto impl = std::make_unique<Impl>();
    impl->id = id;
    impl->file = file;
    try {
        atomic_write(file, initial);
    } catch (const IoError&) {
        throw IoError("cannot create container limit file in " + workdir.string());
    }
    impl->start_worker();
    return Container(std::move(impl));
}

const std::string& Container::id() const { return impl_->id; }
const std::filesystem::path& Container::limit_file() const { return impl_->file; }

MilliCpu Container::read_limit() const {
    std::ifstream in(impl_->file);
    if (!in) throw IoError("cannot read " + impl_->file.string());
    std::string token;
    in >> token;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return MilliCpu(v);
    } catch (const std::exception&) {
        throw FormatError("torn or invalid limit value '" + token + "'", 1);
    }
}

void Container::set_limit_now(MilliCpu value) {
    impl_->drain();
    atomic_write(impl_->file, value);
}

PatchRecord Container::patch(MilliCpu to, double injected_latency_ms) {
    if (!fs::exists(impl_->file)) throw NotFoundError("container missing: " + impl_->id);
    impl_->drain();  // one in-flight patch per container
    PatchRecord rec;
    rec.dispatch_ts = clock_type::now();
    rec.target = to;
    rec.injected_latency_ms = injected_latency_ms;
    const auto deadline =
        rec.dispatch_ts + std::chrono::duration_cast<clock_type::duration>(
                              std::chrono::duration<double, std::milli>(injected_latency_ms));
    impl_->submit(to, deadline, injected_latency_ms <= 0.0);
    return rec;
}

void Container::wait_applied() { impl_->drain(); }

double measure_resize(Container& handle, MilliCpu to, double injected_latency_ms,
                      int poll_interval_us, double timeout_ms) {
    if (handle.read_limit() == to)
        throw std::invalid_argument("measure_resize: limit already at target");
    const PatchRecord rec = handle.patch(to, injected_latency_ms);
    auto next_poll = clock_type::now();
    for (;;) {
        const MilliCpu observed = handle.read_limit();
        // the timestamp is taken after the read returns, so it can never
        // precede the write that made the value visible
        const WatchRecord watch{clock_type::now(), observed, poll_interval_us};
        if (watch.observed == to) return ms_between(rec.dispatch_ts, watch.detect_ts);
        if (ms_between(rec.dispatch_ts, watch.detect_ts) > timeout_ms)
            throw WatchTimeout("no change detected within " + std::to_string(timeout_ms) + " ms");
        // hold the cadence by deadline rather than by timer sleep: poll
        // wakeup latency would otherwise dominate the detection bound
        next_poll += std::chrono::microseconds(poll_interval_us);
        while (clock_type::now() < next_poll) std::this_thread::yield();
    }
}

LatencySource fixed_latency(double ms) {
    return [ms](MilliCpu, MilliCpu) { return ms; };
}

LatencySource sampled_latency(const ResizeLatencyTable& table, LoadState load, SeededRng& rng) {
    return [&table, load, &rng](MilliCpu from, MilliCpu to) {
        return table.sample(from, to, load, rng).latency_ms;
    };
}

std::vector<StepMeasurement> run_plan(const ResizePlan& plan, const LatencySource& latency,
                                      int poll_interval_us, int repetitions,
                                      const fs::path& workdir) {
    Container container =
        Container::create(plan.id + "-" + std::to_string(temp_counter.fetch_add(1)), plan.initial,
                          workdir);
    std::vector<StepMeasurement> out;
    for (int rep = 0; rep < repetitions; ++rep) {
        container.set_limit_now(plan.initial);
        for (const ResizeStep& step : plan.steps) {
            if (!step.timed) {
                container.set_limit_now(step.to);
                continue;
            }
            container.set_limit_now(step.from);
            const double injected = latency(step.from, step.to);
            try {
                const double measured =
                    measure_resize(container, step.to, injected, poll_interval_us);
                out.push_back({step.index, step.from, step.to, rep, injected, measured});
            } catch (const WatchTimeout& e) {
                throw WatchTimeout(std::string(e.what()) + " (plan " + plan.id + ", step " +
                                   std::to_string(step.index) + ")");
            }
        }
    }
    return out;
}

std::string measurements_to_csv(const std::string& plan_id,
                                std::span<const StepMeasurement> rows) {
    std::string out = "plan_id,step_index,from_mcpu,to_mcpu,repetition,injected_ms,measured_ms\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", r.injected_ms, r.measured_ms);
        out += plan_id + "," + std::to_string(r.step_index) + "," + std::to_string(r.from.value) +
               "," + std::to_string(r.to.value) + "," + std::to_string(r.repetition) + "," + buf +
               "\n";
    }
    return out;
}

}  // namespace warmslice
