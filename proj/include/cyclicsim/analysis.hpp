#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyclicsim/engine.hpp"
#include "cyclicsim/shaper.hpp"
#include "cyclicsim/time.hpp"
#include "cyclicsim/topology.hpp"
#include "cyclicsim/traffic.hpp"

namespace cyclicsim {

// Closed-form per-flow delay window. Bounds are phi-exclusive by default:
// delay is measured emission -> delivery, and emission already includes phi.
// Pass include_phi=true for period-start accounting.
struct DelayBounds {
    FlowId flow = 0;
    TimeNs wcd = 0;
    TimeNs bcd = 0;
    TimeNs d_queue = 0;
    TimeNs xi = 0;  // worst-case network delay term along the route
};

// Worst-case lumped network delay of a route:
// sum of link propagation delays + sw_count * processing + sync bound.
TimeNs xi_worst(const Route& route, const NetworkGraph& graph, const DelayParams& params);

DelayBounds bounds_cqf(const Flow& flow, TimeNs slot, const NetworkGraph& graph,
                       const DelayParams& params, bool include_phi = false);
DelayBounds bounds_3q(const Flow& flow, TimeNs slot, const NetworkGraph& graph,
                      const DelayParams& params, bool include_phi = false);
DelayBounds bounds_mcqf(const Flow& flow, const ShaperConfig& config, const NetworkGraph& graph,
                        const DelayParams& params, bool include_phi = false);

// Dispatches on config.kind; one row per flow.
std::vector<DelayBounds> compute_bounds(const FlowSet& flows, const ShaperConfig& config,
                                        const NetworkGraph& graph, const DelayParams& params,
                                        bool include_phi = false);

struct QueueViolation {
    NodeId node;
    NodeId next;
    int gid;
    int queue;
    std::int64_t slot;       // H-wrapped slot label
    std::int64_t occupancy;  // bytes or frames, per capacity mode
    std::int64_t limit;
};

struct BandwidthViolation {
    NodeId node;
    NodeId next;
    int gid;
    std::int64_t slot;
    std::int64_t wire_bytes;
    std::int64_t budget_bytes;  // slot_length * rate / 8
};

struct FeasibilityReport {
    std::vector<OffsetViolation> offset_violations;
    std::vector<QueueViolation> queue_violations;
    std::vector<BandwidthViolation> bandwidth_violations;

    bool pass() const {
        return offset_violations.empty() && queue_violations.empty() &&
               bandwidth_violations.empty();
    }
    std::string summary() const;
};

// Static slot-granular feasibility over one hypercycle, assuming synchronized
// clocks: maps every frame to its per-hop receive slot (+1 per switch, +2 for
// Tolerating hops) and checks queue occupancy and per-slot wire-byte budgets.
FeasibilityReport check_feasibility(const NetworkGraph& graph, const FlowSet& flows,
                                    const ShaperConfig& config,
                                    std::int64_t frame_overhead_b = 42);

struct FlowValidation {
    FlowId flow = 0;
    std::int64_t delivered = 0;
    TimeNs min_delay = 0;
    TimeNs max_delay = 0;
    double mean_delay_us = 0.0;
    TimeNs wcd = 0;
    TimeNs bcd = 0;
    bool pass = true;
};

struct TraceValidation {
    std::vector<FlowValidation> flows;
    bool all_pass() const;
};

// Per-flow containment of simulated delays in [bcd, wcd]; exact in integer ns
// (the 1e-6 µs tolerance is below one ns).
TraceValidation validate_traces(const TraceSet& traces, const std::vector<DelayBounds>& bounds);

}  // namespace cyclicsim
