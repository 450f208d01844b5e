#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyclicsim/analysis.hpp"
#include "cyclicsim/engine.hpp"
#include "cyclicsim/traffic.hpp"

namespace cyclicsim {

// Per-flow KPIs over delivered frames in the measured window:
// SMD = max observed end-to-end delay, SMJ = max - min.
struct FlowKpi {
    FlowId flow = 0;
    int gid = 1;
    QueueSel qid = QueueSel::Normal;
    int sw_num = 0;
    TimeNs period = 0;
    TimeNs smd = 0;
    TimeNs smj = 0;
    double mean_us = 0.0;
    TimeNs min_delay = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    std::int64_t deadline_misses = 0;
    bool no_deliveries = false;
};

// Extrema/means per flow; frames emitted before warmup * H are excluded.
std::vector<FlowKpi> compute_kpis(const TraceSet& traces, const FlowSet& flows,
                                  TimeNs warmup_end = 0);

struct ShaperComparison {
    std::vector<std::string> labels;
    // Rows sorted by (gid, flow id); one smd/smj per label.
    struct Row {
        FlowId flow;
        int gid;
        int sw_num;
        std::vector<TimeNs> smd;
        std::vector<TimeNs> smj;
    };
    std::vector<Row> rows;
};

ShaperComparison compare_shapers(const std::vector<std::string>& labels,
                                 const std::vector<std::vector<FlowKpi>>& kpi_sets);

// CSV emission. Delay columns are emission->delivery microseconds (phi-exclusive).
std::string kpis_to_csv(const std::vector<FlowKpi>& kpis,
                        const std::vector<DelayBounds>* bounds = nullptr,
                        const TraceValidation* validation = nullptr);
std::string comparison_to_csv(const ShaperComparison& cmp);
std::string bounds_to_csv(const std::vector<DelayBounds>& bounds);
std::string validation_to_csv(const TraceValidation& validation);

void write_file(const std::string& path, const std::string& content);

}  // namespace cyclicsim
