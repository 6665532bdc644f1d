#include "warmslice/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "warmslice/rng.hpp"

namespace warmslice {

namespace {

constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kResizeStream = 2;
constexpr std::uint64_t kMaxEvents = 50'000'000;

struct EventAfter {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.at != b.at) return a.at > b.at;
        return a.seq > b.seq;
    }
};

struct RequestRt {
    TraceRecord row;
    int vu = -1;
    int iteration = 0;
    bool routed = false;
};

struct InstanceRt {
    InstanceState pub;
    double remaining_work = 0.0;
    double last_advance_ms = 0.0;
    double rate = 0.0;
    bool completion_scheduled = false;
    std::uint64_t resize_epoch = 0;
    std::uint64_t exec_epoch = 0;
    int pending_launch_request = -1;

    bool executing() const {
        return pub.phase == Phase::Busy || pub.phase == Phase::ScalingUp;
    }
};

class Engine {
public:
    explicit Engine(const ScenarioConfig& cfg)
        : cfg_(cfg),
          arrival_rng_(derive_substream(cfg.seed, kArrivalStream)),
          resize_rng_(derive_substream(cfg.seed, kResizeStream)) {}

    RunResult run() {
        seed_fleet();
        seed_arrivals();
        while (!events_.empty()) {
            if (++out_.events_processed > kMaxEvents)
                throw ProtocolError("event budget exceeded; scenario does not terminate");
            const SimEvent ev = events_.top();
            events_.pop();
            now_ = ev.at;
            dispatch(ev);
        }
        finish();
        return std::move(out_);
    }

private:
    // ---- time & events -------------------------------------------------

    void schedule(double at, EventKind kind, int instance = -1, int vu = -1, int iteration = 0,
                  std::uint64_t epoch = 0) {
        if (at < now_) throw ProtocolError("causality violation: event scheduled in the past");
        events_.push(SimEvent{at, next_seq_++, kind, instance, vu, iteration, epoch});
    }

    void dispatch(const SimEvent& ev) {
        switch (ev.kind) {
            case EventKind::Arrival: on_arrival_event(ev); break;
            case EventKind::InstanceReady: on_instance_ready(ev); break;
            case EventKind::ResizeApplied: on_resize_applied_event(ev); break;
            case EventKind::ExecComplete: on_exec_complete_event(ev); break;
            case EventKind::IdleExpiry: on_idle_expiry_event(ev); break;
        }
    }

    // ---- setup ---------------------------------------------------------

    void seed_fleet() {
        if (cfg_.policy.kind == PolicyKind::Warm || cfg_.policy.kind == PolicyKind::Default) {
            for (int k = 0; k < cfg_.policy.min_scale; ++k) {
                InstanceRt& inst = new_instance();
                inst.pub.phase = Phase::Idle;
                inst.pub.current_cpu = cfg_.policy.active_cpu;
            }
        } else if (cfg_.policy.kind == PolicyKind::InPlace) {
            for (int k = 0; k < cfg_.policy.parked_pool; ++k) {
                InstanceRt& inst = new_instance();
                inst.pub.phase = Phase::Parked;
                inst.pub.current_cpu = cfg_.policy.park_cpu;
            }
        }
    }

    void seed_arrivals() {
        if (cfg_.driver.mode == ArrivalPlan::Mode::ClosedLoop) {
            for (int vu = 0; vu < cfg_.driver.vus; ++vu)
                schedule(0.0, EventKind::Arrival, -1, vu, 0);
        } else {
            const double mean_gap_ms = 1000.0 / cfg_.driver.rate_rps;
            double t = arrival_rng_.exponential(mean_gap_ms);
            int k = 0;
            while (t <= cfg_.driver.horizon_ms) {
                schedule(t, EventKind::Arrival, -1, -1, k++);
                t += arrival_rng_.exponential(mean_gap_ms);
            }
        }
    }

    // ---- fleet helpers -------------------------------------------------

    InstanceRt& new_instance() {
        InstanceRt inst;
        inst.pub.id = static_cast<int>(instances_.size());
        inst.last_advance_ms = now_;
        instances_.push_back(inst);
        return instances_.back();
    }

    std::vector<InstanceState> fleet_view() const {
        std::vector<InstanceState> v;
        v.reserve(instances_.size());
        for (const auto& i : instances_) v.push_back(i.pub);
        return v;
    }

    // The node admits a launch only if the configured allocations of all
    // live instances (counting in-flight resize targets) leave room.
    bool admit_launch(MilliCpu initial) const {
        int configured = 0;
        for (const auto& i : instances_) {
            if (i.pub.phase == Phase::Terminated) continue;
            int c = i.pub.current_cpu.value;
            if (i.pub.pending_target) c = std::max(c, i.pub.pending_target->value);
            configured += c;
        }
        return configured + initial.value <= cfg_.node.capacity.value;
    }

    // ---- work accounting -----------------------------------------------

    void advance_works() {
        for (auto& i : instances_) {
            if (!i.executing()) continue;
            const double dt = now_ - i.last_advance_ms;
            if (dt > 0.0) {
                if (i.rate > 0.0 && i.pub.bound_request)
                    out_.segments.push_back(
                        {*i.pub.bound_request, i.pub.id, i.last_advance_ms, now_, i.rate});
                i.remaining_work = std::max(0.0, i.remaining_work - i.rate * dt);
            }
            i.last_advance_ms = now_;
        }
    }

    void reallocate() {
        advance_works();
        std::vector<MilliCpu> demands;
        std::vector<InstanceRt*> executing;
        for (auto& i : instances_) {
            if (!i.executing()) continue;
            demands.push_back(i.pub.current_cpu);
            executing.push_back(&i);
        }
        if (executing.empty()) return;
        const Allocation alloc = cfs_allocate(demands, cfg_.node.capacity);
        for (std::size_t k = 0; k < executing.size(); ++k) {
            InstanceRt& i = *executing[k];
            const double rate = alloc.rates[k];
            if (rate == i.rate && i.completion_scheduled) continue;
            i.rate = rate;
            const double eta = rate > 0.0 ? i.remaining_work / rate : 0.0;
            ++i.exec_epoch;
            schedule(now_ + eta, EventKind::ExecComplete, i.pub.id, -1, 0, i.exec_epoch);
            i.completion_scheduled = true;
        }
    }

    // ---- actions -------------------------------------------------------

    void dispatch_resize(InstanceRt& inst, MilliCpu target, int request) {
        ++inst.resize_epoch;
        const ResizeSample sample = cfg_.calibration.sample(inst.pub.current_cpu, target,
                                                            cfg_.policy.resize_load, resize_rng_);
        const bool up = target.value > inst.pub.current_cpu.value;
        inst.pub.pending_target = target;
        inst.pub.phase = up ? Phase::ScalingUp : Phase::ScalingDown;
        if (!up) {
            // The down patch takes effect at dispatch for execution and
            // claiming purposes; the sampled latency only delays the
            // Parked label, keeping down durations out of every request.
            inst.pub.current_cpu = target;
        }
        if (request >= 0) requests_[request].row.resize_dispatch_ms = now_;
        schedule(now_ + sample.latency_ms, EventKind::ResizeApplied, inst.pub.id, -1, 0,
                 inst.resize_epoch);
    }

    void bind_and_start(InstanceRt& inst, int request) {
        RequestRt& req = requests_[request];
        inst.pub.bound_request = request;
        inst.pub.idle_deadline.reset();
        if (inst.pub.phase != Phase::ScalingUp) inst.pub.phase = Phase::Busy;
        if (!req.routed) {
            req.row.route_ms = now_;
            req.routed = true;
        }
        req.row.exec_start_ms = now_;
        req.row.instance_id = inst.pub.id;
        inst.remaining_work = cfg_.workload.work.amount;
        inst.last_advance_ms = now_;
        inst.rate = 0.0;
        inst.completion_scheduled = false;
    }

    void launch_for(int request, bool requeue_front) {
        RequestRt& req = requests_[request];
        if (!admit_launch(cfg_.policy.active_cpu)) {
            ++out_.capacity_errors;
            note("capacity-error: request " + std::to_string(request) + " at " +
                 std::to_string(now_) + " ms");
            enqueue(request, requeue_front);
            return;
        }
        InstanceRt& inst = new_instance();
        inst.pub.phase = Phase::Launching;
        inst.pub.current_cpu = cfg_.policy.active_cpu;
        inst.pending_launch_request = request;
        req.row.route_ms = now_;
        req.routed = true;
        req.row.cold_start = true;
        ++out_.launches;
        schedule(now_ + cfg_.policy.cold_start_ms, EventKind::InstanceReady, inst.pub.id);
    }

    void enqueue(int request, bool front) {
        if (front)
            queue_.push_front(request);
        else
            queue_.push_back(request);
    }

    // Returns false when the request could not make progress (queued).
    bool apply_arrival_decision(const PolicyDecision& d, int request, bool requeue_front) {
        bool progressed = true;
        for (const Action& a : d.actions) {
            switch (a.kind) {
                case Action::Kind::DispatchResize:
                    dispatch_resize(instances_[a.instance], a.target, request);
                    break;
                case Action::Kind::RouteTo:
                    bind_and_start(instances_[a.instance], a.request);
                    break;
                case Action::Kind::LaunchInstance:
                    launch_for(a.request, requeue_front);
                    progressed = requests_[a.request].routed;
                    break;
                case Action::Kind::Enqueue:
                    enqueue(a.request, requeue_front);
                    progressed = false;
                    break;
                default:
                    throw ProtocolError("unexpected action on arrival");
            }
        }
        return progressed;
    }

    void route_request(int request, bool requeue_front) {
        const PolicyDecision d =
            warmslice::on_arrival(cfg_.policy, fleet_view(), request, now_);
        apply_arrival_decision(d, request, requeue_front);
    }

    void drain_queue() {
        while (!queue_.empty()) {
            const int head = queue_.front();
            queue_.pop_front();
            const PolicyDecision d =
                warmslice::on_arrival(cfg_.policy, fleet_view(), head, now_);
            if (!apply_arrival_decision(d, head, /*requeue_front=*/true)) break;
        }
    }

    // ---- event handlers ------------------------------------------------

    void on_arrival_event(const SimEvent& ev) {
        const int request = static_cast<int>(requests_.size());
        RequestRt req;
        req.row.request_id = request;
        req.row.workload = cfg_.workload.name;
        req.row.policy = cfg_.policy.kind;
        req.row.arrival_ms = now_;
        req.vu = ev.vu;
        req.iteration = ev.iteration;
        requests_.push_back(std::move(req));
        route_request(request, /*requeue_front=*/false);
        reallocate();
    }

    void on_instance_ready(const SimEvent& ev) {
        InstanceRt& inst = instances_[ev.instance];
        if (inst.pub.phase != Phase::Launching)
            throw ProtocolError("ready event for non-launching instance");
        inst.pub.phase = Phase::Idle;
        const int request = inst.pending_launch_request;
        inst.pending_launch_request = -1;
        bind_and_start(inst, request);
        reallocate();
    }

    void on_resize_applied_event(const SimEvent& ev) {
        InstanceRt& inst = instances_[ev.instance];
        if (ev.epoch != inst.resize_epoch) return;  // superseded by a newer patch
        if (inst.pub.phase == Phase::Terminated) {
            note("stale resize-applied for terminated instance " + std::to_string(ev.instance) +
                 " at " + std::to_string(now_) + " ms");
            return;
        }
        const Phase next = phase_after_resize_applied(inst.pub.phase);
        if (next == inst.pub.phase) {
            note("stale resize-applied for instance " + std::to_string(ev.instance) + " in phase " +
                 to_string(inst.pub.phase));
            return;
        }
        if (inst.pub.phase == Phase::ScalingUp) {
            inst.pub.current_cpu = *inst.pub.pending_target;
            inst.pub.pending_target.reset();
            inst.pub.phase = next;
            if (inst.pub.bound_request)
                requests_[*inst.pub.bound_request].row.resize_applied_ms = now_;
            reallocate();  // the in-flight task drains faster from here on
        } else {
            inst.pub.pending_target.reset();
            inst.pub.phase = next;  // Parked; allocation is unaffected
        }
    }

    void on_exec_complete_event(const SimEvent& ev) {
        InstanceRt& inst = instances_[ev.instance];
        if (ev.epoch != inst.exec_epoch || !inst.executing()) return;  // retracted
        advance_works();
        inst.completion_scheduled = false;
        if (inst.remaining_work > 1e-6 * std::max(1.0, cfg_.workload.work.amount))
            throw ProtocolError("completion fired with work left on instance " +
                                std::to_string(ev.instance));
        inst.remaining_work = 0.0;

        const PolicyDecision d =
            warmslice::on_exec_complete(cfg_.policy, fleet_view(), inst.pub.id, now_);

        const int request = *inst.pub.bound_request;
        RequestRt& req = requests_[request];
        req.row.completion_ms = now_ + cfg_.policy.platform_overhead_ms;
        inst.pub.bound_request.reset();
        inst.rate = 0.0;

        for (const Action& a : d.actions) {
            switch (a.kind) {
                case Action::Kind::DispatchResize:
                    dispatch_resize(instances_[a.instance], a.target, -1);
                    break;
                case Action::Kind::ScheduleIdleExpiry:
                    inst.pub.phase = Phase::Idle;
                    inst.pub.idle_deadline = a.at;
                    schedule(a.at, EventKind::IdleExpiry, inst.pub.id);
                    break;
                default:
                    throw ProtocolError("unexpected action on completion");
            }
        }

        drain_queue();

        if (cfg_.driver.mode == ArrivalPlan::Mode::ClosedLoop && req.vu >= 0 &&
            req.iteration + 1 < cfg_.driver.iterations)
            schedule(*req.row.completion_ms + cfg_.driver.think_ms, EventKind::Arrival, -1, req.vu,
                     req.iteration + 1);

        reallocate();
    }

    void on_idle_expiry_event(const SimEvent& ev) {
        InstanceRt& inst = instances_[ev.instance];
        if (inst.pub.phase != Phase::Idle || !inst.pub.idle_deadline ||
            *inst.pub.idle_deadline != now_)
            return;  // timer was cancelled by intervening traffic
        const PolicyDecision d =
            warmslice::on_idle_expiry(cfg_.policy, fleet_view(), inst.pub.id, now_);
        inst.pub.idle_deadline.reset();
        for (const Action& a : d.actions) {
            if (a.kind != Action::Kind::Terminate)
                throw ProtocolError("unexpected action on idle expiry");
            instances_[a.instance].pub.phase = Phase::Terminated;
        }
        drain_queue();  // freed capacity may admit a queued launch
    }

    // ---- teardown ------------------------------------------------------

    void finish() {
        if (!queue_.empty())
            throw ProtocolError("scenario ended with " + std::to_string(queue_.size()) +
                                " requests stuck in the queue");
        for (const auto& r : requests_) {
            if (!r.row.completion_ms)
                throw ProtocolError("request " + std::to_string(r.row.request_id) +
                                    " never completed");
            out_.trace.push_back(r.row);
        }
    }

    void note(std::string message) { out_.notes.push_back(std::move(message)); }

    const ScenarioConfig& cfg_;
    SeededRng arrival_rng_;
    SeededRng resize_rng_;

    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> events_;
    std::vector<InstanceRt> instances_;
    std::vector<RequestRt> requests_;
    std::deque<int> queue_;
    RunResult out_;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    Engine engine(config);
    return engine.run();
}

}  // namespace warmslice
