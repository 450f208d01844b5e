#include "cyclicsim/analysis.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "cyclicsim/error.hpp"

namespace cyclicsim {

TimeNs xi_worst(const Route& route, const NetworkGraph& graph, const DelayParams& params) {
    TimeNs prop = 0;
    for (std::size_t i = 0; i + 1 < route.path.size(); ++i)
        prop += graph.link_between(route.path[i], route.path[i + 1]).prop_delay;
    return prop + route.sw_count * params.processing + params.sync_error_bound;
}

namespace {

// xi with the sync term signed for the lower bound.
TimeNs xi_best(const Route& route, const NetworkGraph& graph, const DelayParams& params) {
    return xi_worst(route, graph, params) - 2 * params.sync_error_bound;
}

DelayBounds make_bounds(const Flow& flow, TimeNs slot, TimeNs d_queue, const NetworkGraph& graph,
                        const DelayParams& params, bool include_phi) {
    if (slot <= 0) fail(Errc::InvalidParameter, "slot length must be > 0");
    const TimeNs sw = flow.routing.sw_count;
    const TimeNs xi = xi_worst(flow.routing, graph, params);
    DelayBounds b;
    b.flow = flow.id;
    b.d_queue = d_queue;
    b.xi = xi;
    b.wcd = (sw + 1) * slot + sw * d_queue + xi;
    b.bcd = std::max<TimeNs>(0, (sw - 1) * slot + xi_best(flow.routing, graph, params));
    if (include_phi) {
        b.wcd += flow.phi;
        b.bcd += flow.phi;
    }
    return b;
}

}  // namespace

DelayBounds bounds_cqf(const Flow& flow, TimeNs slot, const NetworkGraph& graph,
                       const DelayParams& params, bool include_phi) {
    return make_bounds(flow, slot, 0, graph, params, include_phi);
}

DelayBounds bounds_3q(const Flow& flow, TimeNs slot, const NetworkGraph& graph,
                      const DelayParams& params, bool include_phi) {
    // d_queue = T for every flow, worst case, regardless of qid.
    return make_bounds(flow, slot, slot, graph, params, include_phi);
}

DelayBounds bounds_mcqf(const Flow& flow, const ShaperConfig& config, const NetworkGraph& graph,
                        const DelayParams& params, bool include_phi) {
    const GroupConfig* group = config.find_group(flow.gid);
    if (group == nullptr)
        fail(Errc::UnknownGroup, "gid " + std::to_string(flow.gid) + " not configured");
    const TimeNs d_queue = group->queue_count == 3 ? group->slot_length : 0;
    return make_bounds(flow, group->slot_length, d_queue, graph, params, include_phi);
}

std::vector<DelayBounds> compute_bounds(const FlowSet& flows, const ShaperConfig& config,
                                        const NetworkGraph& graph, const DelayParams& params,
                                        bool include_phi) {
    config.validate();
    std::vector<DelayBounds> out;
    out.reserve(flows.flows.size());
    for (const Flow& f : flows.flows) {
        switch (config.kind) {
            case ShaperKind::Cqf:
                out.push_back(
                    bounds_cqf(f, config.groups[0].slot_length, graph, params, include_phi));
                break;
            case ShaperKind::ThreeQueueCqf:
                out.push_back(
                    bounds_3q(f, config.groups[0].slot_length, graph, params, include_phi));
                break;
            case ShaperKind::Mcqf:
                out.push_back(bounds_mcqf(f, config, graph, params, include_phi));
                break;
        }
    }
    return out;
}

std::string FeasibilityReport::summary() const {
    std::ostringstream out;
    out << "feasibility: " << (pass() ? "pass" : "fail") << " (" << offset_violations.size()
        << " offset, " << queue_violations.size() << " queue, " << bandwidth_violations.size()
        << " bandwidth violations)";
    return out.str();
}

FeasibilityReport check_feasibility(const NetworkGraph& graph, const FlowSet& flows,
                                    const ShaperConfig& config, std::int64_t frame_overhead_b) {
    config.validate();
    FeasibilityReport report;
    report.offset_violations = validate_offsets(flows.flows).violations;
    if (flows.flows.empty()) return report;
    config.validate_against_hypercycle(flows.hypercycle);

    const TimeNs hyper = flows.hypercycle;
    // (node, next, gid, queue, wrapped slot) -> occupancy; occupancy is in the
    // capacity unit for the queue check and wire bytes for the bandwidth check.
    std::map<std::tuple<NodeId, NodeId, int, int, std::int64_t>, std::int64_t> queue_load;
    std::map<std::tuple<NodeId, NodeId, int, std::int64_t>, std::int64_t> slot_tx_bytes;

    for (const Flow& f : flows.flows) {
        const GroupConfig* group = config.find_group(f.gid);
        if (group == nullptr)
            fail(Errc::UnknownGroup, "gid " + std::to_string(f.gid) + " not configured");
        const TimeNs slot_len = group->slot_length;
        const std::int64_t m = hyper / slot_len;
        const std::int64_t wire = f.size_b + frame_overhead_b;
        const bool tolerating =
            group->queue_count == 3 && f.qid.value_or(QueueSel::Normal) == QueueSel::Tolerating;
        const std::int64_t advance = tolerating ? 2 : 1;

        for (TimeNs emission = f.phi; emission < hyper; emission += f.period) {
            std::int64_t recv_slot = emission / slot_len;
            for (std::size_t h = 1; h + 1 < f.routing.path.size(); ++h) {
                const NodeId sw = f.routing.path[h];
                const NodeId next = f.routing.path[h + 1];
                const int queue =
                    group->queue_count == 2
                        ? static_cast<int>(((recv_slot + 1) % 2 + 2) % 2)
                        : static_cast<int>(((recv_slot + advance) % 3 + 3) % 3);
                const std::int64_t occupancy_cost =
                    config.capacity.mode == CapacityMode::FrameCount ? 1 : wire;
                // The frame sits in its queue from its receive slot until its
                // transmit slot opens (1 slot for Normal, 2 for Tolerating).
                for (std::int64_t s = recv_slot; s < recv_slot + advance; ++s)
                    queue_load[{sw, next, f.gid, queue, ((s % m) + m) % m}] += occupancy_cost;
                const std::int64_t tx_slot = recv_slot + advance;
                slot_tx_bytes[{sw, next, f.gid, ((tx_slot % m) + m) % m}] += wire;
                recv_slot = tx_slot;
            }
        }
    }

    if (config.capacity.limit > 0) {
        for (const auto& [key, occ] : queue_load) {
            if (occ > config.capacity.limit) {
                const auto& [node, next, gid, queue, slot] = key;
                report.queue_violations.push_back(
                    {node, next, gid, queue, slot, occ, config.capacity.limit});
            }
        }
    }
    for (const auto& [key, bytes] : slot_tx_bytes) {
        const auto& [node, next, gid, slot] = key;
        const GroupConfig* group = config.find_group(gid);
        const RateBps rate = graph.link_between(node, next).rate_bps;
        // Budget: slot_length * rate / 8 bytes can leave the port per slot.
        const std::int64_t budget = group->slot_length * rate / 8 / 1'000'000'000LL;
        if (bytes > budget)
            report.bandwidth_violations.push_back({node, next, gid, slot, bytes, budget});
    }
    return report;
}

bool TraceValidation::all_pass() const {
    return std::all_of(flows.begin(), flows.end(),
                       [](const FlowValidation& f) { return f.pass; });
}

TraceValidation validate_traces(const TraceSet& traces, const std::vector<DelayBounds>& bounds) {
    TraceValidation result;
    for (const DelayBounds& b : bounds) {
        const FlowTrace* ft = traces.find(b.flow);
        if (ft == nullptr)
            fail(Errc::MissingFlow, "no trace for flow " + std::to_string(b.flow));
        FlowValidation v;
        v.flow = b.flow;
        v.wcd = b.wcd;
        v.bcd = b.bcd;
        TimeNs sum = 0;
        for (const FrameTrace& fr : ft->frames) {
            if (!fr.delivered()) continue;
            const TimeNs d = fr.delay();
            if (v.delivered == 0) {
                v.min_delay = v.max_delay = d;
            } else {
                v.min_delay = std::min(v.min_delay, d);
                v.max_delay = std::max(v.max_delay, d);
            }
            sum += d;
            ++v.delivered;
        }
        if (v.delivered > 0) {
            v.mean_delay_us =
                static_cast<double>(sum) / static_cast<double>(v.delivered) / 1000.0;
            v.pass = v.min_delay >= b.bcd && v.max_delay <= b.wcd;
        }
        result.flows.push_back(v);
    }
    return result;
}

}  // namespace cyclicsim
