#include "cyclicsim/traffic.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "cyclicsim/error.hpp"

namespace cyclicsim {

const Flow* FlowSet::find(FlowId id) const {
    for (const Flow& f : flows)
        if (f.id == id) return &f;
    return nullptr;
}

TimeNs hypercycle(const std::vector<TimeNs>& periods) {
    if (periods.empty()) fail(Errc::EmptyFlowSet, "hypercycle of zero periods");
    __int128 acc = 1;
    for (TimeNs p : periods) {
        if (p <= 0) fail(Errc::InvalidParameter, "period must be > 0");
        const long long g = std::gcd(static_cast<long long>(acc % p), static_cast<long long>(p));
        acc = acc / g * p;
        if (acc > std::numeric_limits<TimeNs>::max())
            fail(Errc::Overflow, "hypercycle exceeds representable range");
    }
    return static_cast<TimeNs>(acc);
}

OffsetReport validate_offsets(const std::vector<Flow>& flows) {
    OffsetReport report;
    for (const Flow& f : flows)
        if (f.phi < 0 || f.phi > f.period) report.violations.push_back({f.id, f.phi, f.period});
    return report;
}

FlowSet generate_flows(const NetworkGraph& graph, const FlowGenParams& params) {
    if (params.n_flows < 0) fail(Errc::InvalidParameter, "n_flows must be >= 0");
    if (params.period_choices.empty())
        fail(Errc::InvalidParameter, "period_choices must be nonempty");
    if (params.payload_min_b < 55 || params.payload_max_b > 1500 ||
        params.payload_min_b > params.payload_max_b)
        fail(Errc::InvalidParameter, "payload range must lie within [55, 1500]");
    if (params.gid_weights.empty()) fail(Errc::InvalidParameter, "gid_weights must be nonempty");
    const std::vector<NodeId> es = graph.end_station_ids();
    if (es.size() < 2) fail(Errc::InvalidParameter, "graph needs >= 2 end stations");
    const std::size_t max_pairs = es.size() * (es.size() - 1);
    if (static_cast<std::size_t>(params.n_flows) > max_pairs)
        fail(Errc::InvalidParameter, "more flows requested than distinct src/dst pairs");

    double total_w = 0.0;
    for (auto& [gid, w] : params.gid_weights) {
        if (w < 0.0) fail(Errc::InvalidParameter, "gid weight must be >= 0");
        total_w += w;
    }
    if (total_w <= 0.0) fail(Errc::InvalidParameter, "gid weights must sum to > 0");

    std::mt19937_64 gen(params.seed);
    std::set<std::pair<NodeId, NodeId>> used;
    FlowSet fs;
    for (int i = 0; i < params.n_flows; ++i) {
        NodeId src = 0, dst = 0;
        do {
            src = es[rng::next_below(gen, es.size())];
            dst = es[rng::next_below(gen, es.size())];
        } while (src == dst || used.count({src, dst}) != 0);
        used.insert({src, dst});

        Flow f;
        f.id = i;
        f.src = src;
        f.dst = dst;
        f.period = params.period_choices[rng::next_below(gen, params.period_choices.size())];
        f.deadline = f.period;
        f.size_b = params.payload_min_b +
                   static_cast<std::int64_t>(rng::next_below(
                       gen, static_cast<std::uint64_t>(params.payload_max_b -
                                                       params.payload_min_b + 1)));
        f.routing = shortest_path(graph, src, dst);
        f.phi = 0;
        f.priority = 7;
        double pick = rng::next_double(gen) * total_w;
        f.gid = params.gid_weights.rbegin()->first;
        for (auto& [gid, w] : params.gid_weights) {
            if (pick < w) {
                f.gid = gid;
                break;
            }
            pick -= w;
        }
        f.qid = rng::next_double(gen) < params.tolerating_share ? QueueSel::Tolerating
                                                                : QueueSel::Normal;
        fs.flows.push_back(std::move(f));
    }
    refresh_hypercycle(fs);
    return fs;
}

FlowSet apply_schedule(FlowSet fs, const std::vector<ScheduleEntry>& entries) {
    for (const ScheduleEntry& e : entries) {
        Flow* target = nullptr;
        for (Flow& f : fs.flows)
            if (f.id == e.id) target = &f;
        if (target == nullptr)
            fail(Errc::UnknownFlowId, "schedule entry for absent flow " + std::to_string(e.id));
        if (e.phi) target->phi = *e.phi;
        if (e.gid) target->gid = *e.gid;
        if (e.qid) target->qid = *e.qid;
    }
    const OffsetReport report = validate_offsets(fs.flows);
    if (!report.ok())
        fail(Errc::OffsetConstraintViolation,
             "flow " + std::to_string(report.violations.front().flow) +
                 " has phi outside [0, period]");
    return fs;
}

void refresh_hypercycle(FlowSet& fs) {
    if (fs.flows.empty()) {
        fs.hypercycle = 0;
        return;
    }
    std::vector<TimeNs> periods;
    periods.reserve(fs.flows.size());
    for (const Flow& f : fs.flows) periods.push_back(f.period);
    fs.hypercycle = hypercycle(periods);
}

}  // namespace cyclicsim
