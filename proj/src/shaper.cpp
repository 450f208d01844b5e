#include "cyclicsim/shaper.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace cyclicsim {

ShaperConfig ShaperConfig::cqf(TimeNs slot) {
    return {ShaperKind::Cqf, {{1, slot, 2}}, {}};
}

ShaperConfig ShaperConfig::three_queue_cqf(TimeNs slot) {
    return {ShaperKind::ThreeQueueCqf, {{1, slot, 3}}, {}};
}

ShaperConfig ShaperConfig::mcqf() {
    return {ShaperKind::Mcqf,
            {{1, 25 * kNsPerUs, 3}, {2, 50 * kNsPerUs, 2}, {3, 100 * kNsPerUs, 2}},
            {}};
}

const GroupConfig* ShaperConfig::find_group(int gid) const {
    for (const GroupConfig& g : groups)
        if (g.gid == gid) return &g;
    return nullptr;
}

void ShaperConfig::validate() const {
    if (groups.empty()) fail(Errc::ValidationError, "shaper needs at least one group");
    std::set<int> gids;
    for (const GroupConfig& g : groups) {
        if (g.slot_length <= 0) fail(Errc::InvalidParameter, "slot length must be > 0");
        if (g.queue_count != 2 && g.queue_count != 3)
            fail(Errc::ValidationError, "queue_count must be 2 or 3");
        if (!gids.insert(g.gid).second)
            fail(Errc::ValidationError, "duplicate gid " + std::to_string(g.gid));
    }
    switch (kind) {
        case ShaperKind::Cqf:
            if (groups.size() != 1 || groups[0].queue_count != 2)
                fail(Errc::ValidationError, "CQF is exactly one 2-queue group");
            break;
        case ShaperKind::ThreeQueueCqf:
            if (groups.size() != 1 || groups[0].queue_count != 3)
                fail(Errc::ValidationError, "3-queue CQF is exactly one 3-queue group");
            break;
        case ShaperKind::Mcqf:
            break;
    }
    if (capacity.limit < 0) fail(Errc::InvalidParameter, "queue capacity must be >= 0");
}

void ShaperConfig::validate_against_hypercycle(TimeNs hypercycle) const {
    for (const GroupConfig& g : groups)
        if (hypercycle % g.slot_length != 0)
            fail(Errc::ValidationError,
                 "slot length " + format_us(g.slot_length) + " us of gid " +
                     std::to_string(g.gid) + " does not divide hypercycle " +
                     format_us(hypercycle) + " us");
}

SlotClock::SlotClock(TimeNs slot, TimeNs hyper) : slot_length(slot), hypercycle(hyper) {
    if (slot <= 0) fail(Errc::InvalidParameter, "slot length must be > 0");
    if (hyper <= 0 || hyper % slot != 0)
        fail(Errc::ValidationError, "slot length must divide the hypercycle");
}

std::int64_t SlotClock::slot_index(TimeNs t) const {
    TimeNs m = t % hypercycle;
    if (m < 0) m += hypercycle;
    return m / slot_length;
}

std::int64_t slot_index(TimeNs t, const SlotClock& clock) { return clock.slot_index(t); }

int transmitting_queue(const GroupConfig& group, std::int64_t j) {
    const auto qc = static_cast<std::int64_t>(group.queue_count);
    return static_cast<int>(((j % qc) + qc) % qc);
}

bool QueueState::try_enqueue(std::uint32_t frame, std::int64_t cost) {
    if (!unlimited() && occupied_ + cost > cap_.limit) return false;
    fifo_.push_back({frame, cost});
    occupied_ += cost;
    max_occupied_ = std::max(max_occupied_, occupied_);
    return true;
}

QueuedFrame QueueState::pop_head() {
    QueuedFrame f = fifo_.front();
    fifo_.pop_front();
    occupied_ -= f.cost;
    return f;
}

std::vector<std::uint32_t> QueueState::contents() const {
    std::vector<std::uint32_t> out;
    out.reserve(fifo_.size());
    for (const QueuedFrame& f : fifo_) out.push_back(f.frame);
    return out;
}

PortShaper::PortShaper(const ShaperConfig& config, TimeNs hypercycle) {
    config.validate();
    config.validate_against_hypercycle(hypercycle);
    for (const GroupConfig& gc : config.groups) {
        GroupState gs;
        gs.config = gc;
        gs.clock = SlotClock(gc.slot_length, hypercycle);
        gs.queues.assign(static_cast<std::size_t>(gc.queue_count), QueueState(config.capacity));
        gs.tx_index = 0;
        groups_.push_back(std::move(gs));
    }
    std::sort(groups_.begin(), groups_.end(),
              [](const GroupState& a, const GroupState& b) { return a.config.gid < b.config.gid; });
}

GroupState& PortShaper::group_by_gid(int gid) {
    int idx = group_index_of(gid);
    if (idx < 0) fail(Errc::UnknownGroup, "gid " + std::to_string(gid) + " not configured");
    return groups_[static_cast<std::size_t>(idx)];
}

int PortShaper::group_index_of(int gid) const {
    for (std::size_t i = 0; i < groups_.size(); ++i)
        if (groups_[i].config.gid == gid) return static_cast<int>(i);
    return -1;
}

ClassifyResult PortShaper::classify(int gid, std::optional<QueueSel> qid, TimeNs t_local) const {
    const int idx = group_index_of(gid);
    if (idx < 0) fail(Errc::UnknownGroup, "gid " + std::to_string(gid) + " not configured");
    const GroupState& gs = groups_[static_cast<std::size_t>(idx)];
    const std::int64_t j = gs.clock.absolute_slot(t_local);
    int queue;
    if (gs.config.queue_count == 2) {
        queue = transmitting_queue(gs.config, j + 1);  // the non-transmitting queue
    } else {
        if (!qid.has_value())
            fail(Errc::MissingQid, "3-queue group " + std::to_string(gid) + " needs a qid");
        queue = transmitting_queue(gs.config, *qid == QueueSel::Normal ? j + 1 : j + 2);
    }
    return {idx, queue};
}

std::vector<std::uint32_t> PortShaper::rotate(int group_index, std::int64_t new_absolute_slot) {
    GroupState& gs = groups_[static_cast<std::size_t>(group_index)];
    gs.tx_index = transmitting_queue(gs.config, new_absolute_slot);
    return gs.transmitting().contents();
}

ClassifyResult classify(const Flow& flow, const PortShaper& port, TimeNs t_local) {
    return port.classify(flow.gid, flow.qid, t_local);
}

}  // namespace cyclicsim
