#include "cyclicsim/engine.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

#include "cyclicsim/error.hpp"

namespace cyclicsim {

const FlowTrace* TraceSet::find(FlowId id) const {
    for (const FlowTrace& ft : flows)
        if (ft.flow == id) return &ft;
    return nullptr;
}

std::string TraceSet::canonical() const {
    std::ostringstream out;
    for (const FlowTrace& ft : flows) {
        out << "flow " << ft.flow << " emitted " << ft.emitted << " delivered " << ft.delivered
            << " dropped " << ft.dropped << "\n";
        for (const FrameTrace& fr : ft.frames) {
            out << "  frame " << fr.seq << " emit " << fr.emission;
            if (fr.dropped)
                out << " dropped-at " << fr.drop_node;
            else
                out << " deliver " << fr.delivery;
            out << " overrun " << (fr.slot_overrun ? 1 : 0) << " hops";
            for (const HopRecord& h : fr.hops)
                out << " " << h.node << ":" << h.arrival << ":" << h.enqueue << ":" << h.dequeue
                    << ":" << h.tx_start << ":" << h.tx_end;
            out << "\n";
        }
    }
    out << "drops " << total_drops << " overruns " << total_slot_overruns << "\n";
    return out.str();
}

TimeNs residence_time(const FrameTrace& frame, std::size_t hop) {
    if (hop >= frame.hops.size())
        fail(Errc::UnknownHop, "frame has " + std::to_string(frame.hops.size()) + " hops");
    return frame.hops[hop].dequeue - frame.hops[hop].enqueue;
}

namespace {

enum class EvType { SlotBoundary, PortKick, Arrival, TxComplete };

// Class order at equal times: boundaries, then port kicks spawned by them,
// then arrivals, then transmission completions; within a class (k1, k2, k3).
struct Event {
    TimeNs t = 0;
    int klass = 0;
    std::int64_t k1 = 0, k2 = 0, k3 = 0;
    EvType type = EvType::PortKick;
    int port = -1;
    int group_index = -1;
    std::int64_t slot = 0;
    std::uint32_t frame = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.t, a.klass, a.k1, a.k2, a.k3) >
               std::tie(b.t, b.klass, b.k1, b.k2, b.k3);
    }
};

struct FrameInstance {
    std::uint32_t flow_index = 0;
    std::int64_t seq = 0;
    TimeNs emission = 0;
    std::int64_t wire_bytes = 0;
    std::int64_t queue_cost = 0;
    std::size_t hop = 0;  // index into route.path of the current node
    // overrun bookkeeping: last (port, slot) already counted
    int overrun_port = -1;
    std::int64_t overrun_slot = -1;
};

struct Port {
    NodeId from = -1;
    NodeId to = -1;
    RateBps rate = 0;
    TimeNs prop = 0;
    bool gated = false;        // switches gate their egress; end stations do not
    PortShaper shaper;
    std::deque<std::uint32_t> es_fifo;
    TimeNs busy_until = 0;
};

class Engine {
public:
    Engine(const NetworkGraph& graph, const FlowSet& flows, const ShaperConfig& shaper,
           const DelayParams& delays, const SimConfig& sim)
        : graph_(graph), flows_(flows), shaper_(shaper), delays_(delays), sim_(sim) {}

    TraceSet run();

private:
    void validate() const;
    void build_ports();
    void draw_clock_offsets();
    void schedule_emissions();
    void seed_slot_boundaries();

    TimeNs to_local(NodeId node, TimeNs t_global) const { return t_global + offset_of(node); }
    TimeNs offset_of(NodeId node) const;
    int port_index(NodeId from, NodeId to) const;
    const Flow& flow_of(const FrameInstance& fr) const {
        return flows_.flows[fr.flow_index];
    }

    void push(Event ev) { events_.push(ev); }
    void on_slot_boundary(const Event& ev);
    void on_port_kick(const Event& ev);
    void on_arrival(const Event& ev);
    void on_tx_complete(const Event& ev);
    void try_start_transmission(int port_idx, TimeNs now);
    void start_frame(int port_idx, std::uint32_t frame_idx, TimeNs now);
    void finish_frame(std::uint32_t frame_idx, NodeId at, bool drop, TimeNs t);
    bool work_remaining() const { return pending_emissions_ > 0 || in_flight_ > 0; }

    FrameTrace& trace_of(const FrameInstance& fr) {
        return traces_.flows[fr.flow_index].frames[static_cast<std::size_t>(fr.seq)];
    }

    const NetworkGraph& graph_;
    const FlowSet& flows_;
    const ShaperConfig& shaper_;
    const DelayParams& delays_;
    const SimConfig& sim_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::vector<Port> ports_;
    std::map<std::pair<NodeId, NodeId>, int> port_of_;
    std::map<NodeId, TimeNs> clock_offset_;
    std::vector<FrameInstance> frames_;
    TraceSet traces_;
    std::int64_t pending_emissions_ = 0;
    std::int64_t in_flight_ = 0;
};

TimeNs Engine::offset_of(NodeId node) const {
    auto it = clock_offset_.find(node);
    return it == clock_offset_.end() ? 0 : it->second;
}

int Engine::port_index(NodeId from, NodeId to) const {
    auto it = port_of_.find({from, to});
    if (it == port_of_.end())
        fail(Errc::ValidationError,
             "no port " + std::to_string(from) + "->" + std::to_string(to));
    return it->second;
}

void Engine::validate() const {
    shaper_.validate();
    shaper_.validate_against_hypercycle(flows_.hypercycle);
    const OffsetReport offsets = validate_offsets(flows_.flows);
    if (!offsets.ok())
        fail(Errc::ValidationError, "offset constraint violated by flow " +
                                        std::to_string(offsets.violations.front().flow));
    std::set<FlowId> ids;
    for (const Flow& f : flows_.flows) {
        if (!ids.insert(f.id).second)
            fail(Errc::ValidationError, "duplicate flow id " + std::to_string(f.id));
        if (f.routing.path.size() < 3 || f.routing.path.front() != f.src ||
            f.routing.path.back() != f.dst)
            fail(Errc::ValidationError,
                 "flow " + std::to_string(f.id) + " has no usable route");
        const GroupConfig* group = shaper_.find_group(f.gid);
        if (group == nullptr)
            fail(Errc::ValidationError, "flow " + std::to_string(f.id) + " references gid " +
                                            std::to_string(f.gid) + " absent from shaper");
        if (group->queue_count == 3 && !f.qid.has_value())
            fail(Errc::MissingQid, "flow " + std::to_string(f.id) + " needs a qid");
        // A frame must fit inside one slot or it can never be serialized.
        const std::int64_t wire = f.size_b + sim_.frame_overhead_b;
        for (std::size_t i = 0; i + 1 < f.routing.path.size(); ++i) {
            const Link& l = graph_.link_between(f.routing.path[i], f.routing.path[i + 1]);
            if (tx_time_ns(wire, l.rate_bps) > group->slot_length)
                fail(Errc::ValidationError,
                     "flow " + std::to_string(f.id) + " frame does not fit in one slot");
        }
    }
    if (sim_.hypercycles < 1 || sim_.warmup_hypercycles < 0 ||
        sim_.warmup_hypercycles >= sim_.hypercycles)
        fail(Errc::ValidationError, "need hypercycles >= 1 and warmup < horizon");
}

void Engine::build_ports() {
    for (const Node& n : graph_.nodes()) {
        for (NodeId nb : graph_.neighbors(n.id)) {
            const Link& l = graph_.link_between(n.id, nb);
            Port p;
            p.from = n.id;
            p.to = nb;
            p.rate = l.rate_bps;
            p.prop = l.prop_delay;
            p.gated = n.kind == NodeKind::Switch;
            if (p.gated) p.shaper = PortShaper(shaper_, flows_.hypercycle);
            port_of_[{n.id, nb}] = static_cast<int>(ports_.size());
            ports_.push_back(std::move(p));
        }
    }
    // Rotation state at t = 0 follows each node's local clock.
    for (Port& p : ports_) {
        if (!p.gated) continue;
        const TimeNs local0 = to_local(p.from, 0);
        for (GroupState& gs : p.shaper.groups())
            gs.tx_index = transmitting_queue(gs.config, gs.clock.absolute_slot(local0));
    }
}

void Engine::draw_clock_offsets() {
    if (delays_.sync_error_bound <= 0) return;
    std::mt19937_64 gen(sim_.seed);
    const std::uint64_t span = static_cast<std::uint64_t>(2 * delays_.sync_error_bound + 1);
    for (const Node& n : graph_.nodes())
        clock_offset_[n.id] =
            static_cast<TimeNs>(rng::next_below(gen, span)) - delays_.sync_error_bound;
}

void Engine::schedule_emissions() {
    const TimeNs horizon = sim_.hypercycles * flows_.hypercycle;
    traces_.flows.resize(flows_.flows.size());
    for (std::uint32_t fi = 0; fi < flows_.flows.size(); ++fi) {
        const Flow& f = flows_.flows[fi];
        traces_.flows[fi].flow = f.id;
        for (std::int64_t k = 0;; ++k) {
            const TimeNs emission = k * f.period + f.phi;
            if (emission >= horizon) break;
            FrameInstance fr;
            fr.flow_index = fi;
            fr.seq = k;
            fr.emission = emission;
            fr.wire_bytes = f.size_b + sim_.frame_overhead_b;
            fr.queue_cost = shaper_.capacity.mode == CapacityMode::FrameCount ? 1 : f.size_b;
            const auto frame_idx = static_cast<std::uint32_t>(frames_.size());
            frames_.push_back(fr);

            FrameTrace tr;
            tr.flow = f.id;
            tr.seq = k;
            tr.emission = emission;
            traces_.flows[fi].frames.push_back(tr);
            traces_.flows[fi].emitted += 1;

            Event ev;
            ev.t = emission;
            ev.klass = 2;
            ev.k1 = f.src;
            ev.k2 = f.id;
            ev.k3 = k;
            ev.type = EvType::Arrival;
            ev.frame = frame_idx;
            push(ev);
            ++pending_emissions_;
        }
    }
}

void Engine::seed_slot_boundaries() {
    for (std::size_t pi = 0; pi < ports_.size(); ++pi) {
        Port& p = ports_[pi];
        if (!p.gated) continue;
        const TimeNs off = offset_of(p.from);
        for (std::size_t gi = 0; gi < p.shaper.groups().size(); ++gi) {
            const GroupState& gs = p.shaper.groups()[gi];
            // First boundary with global time >= 0.
            std::int64_t n = gs.clock.absolute_slot(to_local(p.from, 0));
            TimeNs t_global = gs.clock.slot_start(n) - off;
            while (t_global < 0) {
                ++n;
                t_global = gs.clock.slot_start(n) - off;
            }
            Event ev;
            ev.t = t_global;
            ev.klass = 0;
            ev.k1 = p.from;
            ev.k2 = static_cast<std::int64_t>(pi);
            ev.k3 = gs.config.gid;
            ev.type = EvType::SlotBoundary;
            ev.port = static_cast<int>(pi);
            ev.group_index = static_cast<int>(gi);
            ev.slot = n;
            push(ev);
        }
    }
}

void Engine::on_slot_boundary(const Event& ev) {
    Port& p = ports_[static_cast<std::size_t>(ev.port)];
    p.shaper.rotate(ev.group_index, ev.slot);

    Event kick;
    kick.t = ev.t;
    kick.klass = 1;
    kick.k1 = ev.k1;
    kick.k2 = ev.k2;
    kick.type = EvType::PortKick;
    kick.port = ev.port;
    push(kick);

    if (!work_remaining()) return;
    const GroupState& gs = p.shaper.groups()[static_cast<std::size_t>(ev.group_index)];
    Event next = ev;
    next.slot = ev.slot + 1;
    next.t = gs.clock.slot_start(next.slot) - offset_of(p.from);
    push(next);
}

void Engine::on_port_kick(const Event& ev) { try_start_transmission(ev.port, ev.t); }

void Engine::on_arrival(const Event& ev) {
    FrameInstance& fr = frames_[ev.frame];
    const Flow& flow = flow_of(fr);
    FrameTrace& tr = trace_of(fr);
    const NodeId here = flow.routing.path[fr.hop];

    if (fr.hop == 0) {
        --pending_emissions_;
        ++in_flight_;
        HopRecord hop;
        hop.node = here;
        hop.arrival = ev.t;
        hop.enqueue = ev.t;
        tr.hops.push_back(hop);
        const int pi = port_index(here, flow.routing.path[1]);
        ports_[static_cast<std::size_t>(pi)].es_fifo.push_back(ev.frame);
        try_start_transmission(pi, ev.t);
        return;
    }

    if (fr.hop == flow.routing.path.size() - 1) {
        tr.delivery = ev.t;
        traces_.flows[fr.flow_index].delivered += 1;
        --in_flight_;
        return;
    }

    // Switch hop: ev.t is the post-processing classification instant.
    Port& egress = ports_[static_cast<std::size_t>(
        port_index(here, flow.routing.path[fr.hop + 1]))];
    HopRecord hop;
    hop.node = here;
    hop.arrival = ev.t - delays_.processing;
    hop.enqueue = ev.t;
    const ClassifyResult where =
        egress.shaper.classify(flow.gid, flow.qid, to_local(here, ev.t));
    GroupState& gs = egress.shaper.groups()[static_cast<std::size_t>(where.group_index)];
    QueueState& q = gs.queues[static_cast<std::size_t>(where.queue_index)];
    if (!q.try_enqueue(ev.frame, fr.queue_cost)) {
        tr.hops.push_back(hop);
        finish_frame(ev.frame, here, true, ev.t);
        return;
    }
    tr.hops.push_back(hop);
}

void Engine::on_tx_complete(const Event& ev) {
    FrameInstance& fr = frames_[ev.frame];
    const Flow& flow = flow_of(fr);
    const NodeId here = flow.routing.path[fr.hop];
    const NodeId next = flow.routing.path[fr.hop + 1];
    const int pi = port_index(here, next);
    Port& p = ports_[static_cast<std::size_t>(pi)];

    fr.hop += 1;
    Event arrival;
    arrival.klass = 2;
    arrival.k1 = next;
    arrival.k2 = flow.id;
    arrival.k3 = fr.seq;
    arrival.type = EvType::Arrival;
    arrival.frame = ev.frame;
    const bool next_is_switch = graph_.node(next).kind == NodeKind::Switch;
    arrival.t = ev.t + p.prop + (next_is_switch ? delays_.processing : 0);
    push(arrival);

    try_start_transmission(pi, ev.t);
}

void Engine::try_start_transmission(int port_idx, TimeNs now) {
    Port& p = ports_[static_cast<std::size_t>(port_idx)];
    if (p.busy_until > now) return;

    if (!p.gated) {
        if (p.es_fifo.empty()) return;
        const std::uint32_t frame_idx = p.es_fifo.front();
        p.es_fifo.pop_front();
        start_frame(port_idx, frame_idx, now);
        return;
    }

    const TimeNs local = to_local(p.from, now);
    for (GroupState& gs : p.shaper.groups()) {  // ascending gid
        QueueState& q = gs.transmitting();
        const QueuedFrame* head = q.head();
        if (head == nullptr) continue;
        FrameInstance& fr = frames_[head->frame];
        const std::int64_t abs_slot = gs.clock.absolute_slot(local);
        const TimeNs slot_close = gs.clock.slot_start(abs_slot + 1) - offset_of(p.from);
        if (now + tx_time_ns(fr.wire_bytes, p.rate) <= slot_close) {
            start_frame(port_idx, q.pop_head().frame, now);
            return;
        }
        // Head cannot finish before the slot closes: it stays queued for this
        // queue's next transmitting slot.
        if (fr.overrun_port != port_idx || fr.overrun_slot != abs_slot) {
            fr.overrun_port = port_idx;
            fr.overrun_slot = abs_slot;
            trace_of(fr).slot_overrun = true;
            ++traces_.total_slot_overruns;
        }
    }
}

void Engine::start_frame(int port_idx, std::uint32_t frame_idx, TimeNs now) {
    Port& p = ports_[static_cast<std::size_t>(port_idx)];
    FrameInstance& fr = frames_[frame_idx];
    FrameTrace& tr = trace_of(fr);
    HopRecord& hop = tr.hops.back();
    hop.dequeue = now;
    hop.tx_start = now;
    hop.tx_end = now + tx_time_ns(fr.wire_bytes, p.rate);
    p.busy_until = hop.tx_end;

    Event done;
    done.t = hop.tx_end;
    done.klass = 3;
    done.k1 = p.from;
    done.k2 = flow_of(fr).id;
    done.k3 = fr.seq;
    done.type = EvType::TxComplete;
    done.frame = frame_idx;
    done.port = port_idx;
    push(done);
}

void Engine::finish_frame(std::uint32_t frame_idx, NodeId at, bool drop, TimeNs) {
    FrameInstance& fr = frames_[frame_idx];
    FrameTrace& tr = trace_of(fr);
    if (drop) {
        tr.dropped = true;
        tr.drop_node = at;
        traces_.flows[fr.flow_index].dropped += 1;
        ++traces_.total_drops;
        --in_flight_;
    }
}

TraceSet Engine::run() {
    if (flows_.flows.empty()) return traces_;
    validate();
    draw_clock_offsets();
    build_ports();
    schedule_emissions();
    seed_slot_boundaries();

    while (!events_.empty()) {
        const Event ev = events_.top();
        events_.pop();
        switch (ev.type) {
            case EvType::SlotBoundary: on_slot_boundary(ev); break;
            case EvType::PortKick: on_port_kick(ev); break;
            case EvType::Arrival: on_arrival(ev); break;
            case EvType::TxComplete: on_tx_complete(ev); break;
        }
    }

    for (std::size_t pi = 0; pi < ports_.size(); ++pi) {
        const Port& p = ports_[pi];
        if (!p.gated) continue;
        for (const GroupState& gs : p.shaper.groups())
            for (std::size_t qi = 0; qi < gs.queues.size(); ++qi)
                traces_.max_queue_occupancy[{p.from, p.to, gs.config.gid,
                                             static_cast<int>(qi)}] =
                    gs.queues[qi].max_occupied();
    }
    return traces_;
}

}  // namespace

TraceSet run(const NetworkGraph& graph, const FlowSet& flows, const ShaperConfig& shaper,
             const DelayParams& delays, const SimConfig& sim) {
    return Engine(graph, flows, shaper, delays, sim).run();
}

}  // namespace cyclicsim
