#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cyclicsim/time.hpp"
#include "cyclicsim/topology.hpp"

namespace cyclicsim {

using FlowId = std::int32_t;

enum class QueueSel { Normal, Tolerating };

// Periodic TT flow. gid selects the MCQF group (fixed to the single group for
// CQF / 3-queue CQF); qid selects Normal vs Tolerating within 3-queue groups.
struct Flow {
    FlowId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    TimeNs period = 0;
    TimeNs deadline = 0;
    std::int64_t size_b = 0;  // payload bytes
    Route routing;
    TimeNs phi = 0;
    int priority = 7;
    int gid = 1;
    std::optional<QueueSel> qid = QueueSel::Normal;
};

struct FlowSet {
    std::vector<Flow> flows;
    TimeNs hypercycle = 0;

    const Flow* find(FlowId id) const;
};

struct OffsetViolation {
    FlowId flow;
    TimeNs phi;
    TimeNs period;
};

struct OffsetReport {
    std::vector<OffsetViolation> violations;
    bool ok() const { return violations.empty(); }
};

struct ScheduleEntry {
    FlowId id = 0;
    std::optional<TimeNs> phi;
    std::optional<int> gid;
    std::optional<QueueSel> qid;
};

struct FlowGenParams {
    int n_flows = 10;
    std::vector<TimeNs> period_choices;        // integral µs, stored as ns
    std::int64_t payload_min_b = 55;
    std::int64_t payload_max_b = 1500;
    std::map<int, double> gid_weights = {{1, 1.0}};
    double tolerating_share = 0.0;             // P(qid = Tolerating)
    std::uint64_t seed = 1;
};

// LCM of the periods (Overflow when it leaves int64 ns range).
TimeNs hypercycle(const std::vector<TimeNs>& periods);

// Report-style check of 0 <= phi <= period over the set.
OffsetReport validate_offsets(const std::vector<Flow>& flows);

FlowSet generate_flows(const NetworkGraph& graph, const FlowGenParams& params);

// Ingests externally computed per-flow phi/gid/qid and re-validates offsets.
FlowSet apply_schedule(FlowSet flows, const std::vector<ScheduleEntry>& entries);

// Recomputes the stored hypercycle from flow periods (used after edits).
void refresh_hypercycle(FlowSet& fs);

}  // namespace cyclicsim
