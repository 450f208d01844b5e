#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "cyclicsim/error.hpp"
#include "cyclicsim/time.hpp"
#include "cyclicsim/traffic.hpp"

namespace cyclicsim {

enum class ShaperKind { Cqf, ThreeQueueCqf, Mcqf };

enum class CapacityMode { FrameCount, Bytes };

struct QueueCapacity {
    CapacityMode mode = CapacityMode::Bytes;
    std::int64_t limit = 0;  // 0 = unlimited
};

struct GroupConfig {
    int gid = 1;
    TimeNs slot_length = 50 * kNsPerUs;
    int queue_count = 2;
};

struct ShaperConfig {
    ShaperKind kind = ShaperKind::Cqf;
    std::vector<GroupConfig> groups;
    QueueCapacity capacity;

    // Paper-default parameterizations: T = 50 µs for CQF / 3-queue CQF,
    // T_G1/G2/G3 = 25/50/100 µs for MCQF (G1 runs three queues).
    static ShaperConfig cqf(TimeNs slot = 50 * kNsPerUs);
    static ShaperConfig three_queue_cqf(TimeNs slot = 50 * kNsPerUs);
    static ShaperConfig mcqf();

    const GroupConfig* find_group(int gid) const;
    // Structural invariants: group multiplicity/queue counts per kind,
    // positive slot lengths, distinct gids.
    void validate() const;
    // Scenario-level invariant: every slot length divides the hypercycle.
    void validate_against_hypercycle(TimeNs hypercycle) const;
};

struct SlotClock {
    TimeNs slot_length = 0;
    TimeNs hypercycle = 0;

    SlotClock() = default;
    SlotClock(TimeNs slot, TimeNs hyper);

    std::int64_t slot_count() const { return hypercycle / slot_length; }
    // H-wrapped slot label, floor((t mod H) / T); boundaries belong to the new slot.
    std::int64_t slot_index(TimeNs t) const;
    // Monotonic slot number floor(t / T); drives queue-role rotation so the
    // rotation phase survives hypercycle wrap even when m % queue_count != 0.
    std::int64_t absolute_slot(TimeNs t) const { return t / slot_length; }
    TimeNs slot_start(std::int64_t absolute) const { return absolute * slot_length; }
};

std::int64_t slot_index(TimeNs t, const SlotClock& clock);

// Queue transmitting during slot j; the remaining queue(s) receive.
int transmitting_queue(const GroupConfig& group, std::int64_t j);

struct QueuedFrame {
    std::uint32_t frame = 0;
    std::int64_t cost = 0;
};

// One FIFO with Eq.-style occupancy bookkeeping: occupied + free == q_len.
class QueueState {
public:
    QueueState() = default;
    explicit QueueState(QueueCapacity cap) : cap_(cap) {}

    bool try_enqueue(std::uint32_t frame, std::int64_t cost);
    const QueuedFrame* head() const { return fifo_.empty() ? nullptr : &fifo_.front(); }
    QueuedFrame pop_head();
    std::size_t size() const { return fifo_.size(); }
    bool empty() const { return fifo_.empty(); }
    std::int64_t occupied() const { return occupied_; }
    std::int64_t q_len() const { return cap_.limit; }
    std::int64_t q_free() const { return cap_.limit == 0 ? 0 : cap_.limit - occupied_; }
    bool unlimited() const { return cap_.limit == 0; }
    std::int64_t max_occupied() const { return max_occupied_; }
    std::vector<std::uint32_t> contents() const;

private:
    QueueCapacity cap_;
    std::deque<QueuedFrame> fifo_;
    std::int64_t occupied_ = 0;
    std::int64_t max_occupied_ = 0;
};

// Per-group shaper state on one egress port.
struct GroupState {
    GroupConfig config;
    SlotClock clock;
    std::vector<QueueState> queues;
    int tx_index = 0;

    QueueState& transmitting() { return queues[static_cast<std::size_t>(tx_index)]; }
};

struct ClassifyResult {
    int group_index = 0;  // position in PortShaper::groups()
    int queue_index = 0;
};

// Cyclic shaper state of one egress port: a slot clock and queue ring per
// group, with receive/transmit roles rotating every slot.
class PortShaper {
public:
    PortShaper() = default;
    PortShaper(const ShaperConfig& config, TimeNs hypercycle);

    std::vector<GroupState>& groups() { return groups_; }
    const std::vector<GroupState>& groups() const { return groups_; }
    GroupState& group_by_gid(int gid);
    int group_index_of(int gid) const;  // -1 when absent

    // Maps (gid, qid) at local time t to the queue that must store the frame:
    //   2-queue group: the receiving queue of the current slot, (j+1) mod 2;
    //   3-queue group: Normal -> (j+1) mod 3, Tolerating -> (j+2) mod 3.
    ClassifyResult classify(int gid, std::optional<QueueSel> qid, TimeNs t_local) const;

    // Advances the group's transmit role at a slot boundary and returns the
    // newly transmitting queue's FIFO contents (frames stay queued until the
    // engine actually serializes them).
    std::vector<std::uint32_t> rotate(int group_index, std::int64_t new_absolute_slot);

private:
    std::vector<GroupState> groups_;  // ascending gid
};

ClassifyResult classify(const Flow& flow, const PortShaper& port, TimeNs t_local);

}  // namespace cyclicsim
