#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cyclicsim/shaper.hpp"
#include "cyclicsim/time.hpp"
#include "cyclicsim/topology.hpp"
#include "cyclicsim/traffic.hpp"

namespace cyclicsim {

struct DelayParams {
    TimeNs processing = 1 * kNsPerUs;   // per switch traversal
    TimeNs sync_error_bound = 0;        // per-node clock offset drawn in [-bound, +bound]
};

struct SimConfig {
    int hypercycles = 1;
    int warmup_hypercycles = 0;
    std::uint64_t seed = 1;
    std::int64_t frame_overhead_b = 42;  // Ethernet header+FCS 22, preamble/SFD 8, IFG 12
};

// Timestamps of one frame at one transmitting node (src ES or a switch).
struct HopRecord {
    NodeId node = -1;
    TimeNs arrival = 0;   // at the node (before processing)
    TimeNs enqueue = 0;   // into the egress queue
    TimeNs dequeue = 0;   // popped for serialization
    TimeNs tx_start = 0;
    TimeNs tx_end = 0;
};

struct FrameTrace {
    FlowId flow = 0;
    std::int64_t seq = 0;
    TimeNs emission = 0;
    std::vector<HopRecord> hops;
    TimeNs delivery = -1;  // -1 while undelivered
    bool dropped = false;
    NodeId drop_node = -1;
    bool slot_overrun = false;

    bool delivered() const { return delivery >= 0; }
    TimeNs delay() const { return delivery - emission; }
};

struct FlowTrace {
    FlowId flow = 0;
    std::vector<FrameTrace> frames;  // seq order
    std::int64_t emitted = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
};

struct TraceSet {
    std::vector<FlowTrace> flows;  // FlowSet order
    std::int64_t total_drops = 0;
    std::int64_t total_slot_overruns = 0;
    // (node, next hop, gid, queue) -> peak occupancy in the capacity unit
    std::map<std::tuple<NodeId, NodeId, int, int>, std::int64_t> max_queue_occupancy;

    const FlowTrace* find(FlowId id) const;
    // Deterministic byte representation of the observable behavior: per-flow
    // frame records and drop/overrun counters. Queue-index-keyed stats are
    // deliberately excluded so equivalent shapers serialize identically.
    std::string canonical() const;
};

// Deterministic event-driven run over [0, hypercycles * H); frames emitted
// inside the window are always driven to delivery or drop.
TraceSet run(const NetworkGraph& graph, const FlowSet& flows, const ShaperConfig& shaper,
             const DelayParams& delays, const SimConfig& sim);

// Queue residence (dequeue - enqueue) of a frame at hop index `hop` along its route.
TimeNs residence_time(const FrameTrace& frame, std::size_t hop);

}  // namespace cyclicsim
