#pragma once

#include "ehctrl/rng.hpp"
#include "ehctrl/scheduler.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ehctrl {

/// When nodes can exchange dual variables.
struct AvailabilitySchedule {
    enum class Mode {
        always_on,  ///< every node sends and receives every slot
        random,     ///< each node is up with probability `prob`; both ends of a pair must be up
        piggyback,  ///< duals ride on measurement packets: a node sends only when it transmits
    };

    Mode mode = Mode::always_on;
    double prob = 0.5;
    std::uint32_t max_staleness = 10;  ///< B

    void validate() const;
    static Mode parse(const std::string& name);
    static std::string name(Mode mode);
};

/// Availability for one slot. Node i receives node j's duals iff
/// sends[j] && receives[i]; `sends` is membership of the slot in T^j.
struct Availability {
    std::vector<bool> sends;
    std::vector<bool> receives;

    [[nodiscard]] bool in_set(std::size_t node) const { return sends[node]; }
    [[nodiscard]] bool pair(std::size_t receiver, std::size_t sender) const {
        return sends[sender] && receives[receiver];
    }
    static Availability all(std::size_t nodes);
};

/// Produces per-slot availability sets. Whenever a pair's copy would exceed
/// staleness B at the next slot, both ends are forced up, so every
/// generated schedule satisfies the bounded-delay condition.
class AvailabilityGenerator {
public:
    AvailabilityGenerator(AvailabilitySchedule schedule, std::size_t nodes);

    /// `rng` holds one stream per node (only consulted in random mode);
    /// `transmitted` drives piggyback mode.
    Availability advance(std::uint64_t slot, std::span<RandomStream> rng,
                         const std::vector<bool>& transmitted);

    [[nodiscard]] const AvailabilitySchedule& schedule() const noexcept { return schedule_; }

private:
    [[nodiscard]] std::int64_t& last(std::size_t receiver, std::size_t sender) {
        return last_exchange_[receiver * nodes_ + sender];
    }

    AvailabilitySchedule schedule_;
    std::size_t nodes_;
    std::vector<std::int64_t> last_exchange_;
};

/// Snapshots of remote multipliers. Entry (i, j) holds nu_ji as it stood at
/// the end of slot last_slot(i, j); before any exchange the snapshot is the
/// initial zero and last_slot is -1.
class DualMailbox {
public:
    explicit DualMailbox(std::size_t nodes);

    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] double value(std::size_t receiver, std::size_t sender) const {
        return entries_[receiver * nodes_ + sender].value;
    }
    [[nodiscard]] std::int64_t last_slot(std::size_t receiver, std::size_t sender) const {
        return entries_[receiver * nodes_ + sender].last_slot;
    }
    /// Age, in slots, of the copy used while deciding in `slot`.
    [[nodiscard]] std::int64_t staleness(std::size_t receiver, std::size_t sender,
                                         std::uint64_t slot) const {
        return static_cast<std::int64_t>(slot) - last_slot(receiver, sender);
    }

    /// For every available pair, copy nu_ji from the sender's current state.
    void exchange(const Availability& availability, std::span<const NodeDualState> duals,
                  std::uint64_t slot);

    /// Write each receiver's snapshots into its nu_remote.
    void deliver(std::span<NodeDualState> duals) const;

private:
    struct Entry {
        double value = 0.0;
        std::int64_t last_slot = -1;
    };
    std::size_t nodes_;
    std::vector<Entry> entries_;
};

/// Zero the nu_ij components (j != node) whose sender j is outside T^j this
/// slot; those multipliers stay frozen. The node's own nu_ii, phi and beta
/// are always updated.
DualSubgradient asynchronous_subgradient_mask(const Availability& availability, std::size_t node,
                                              DualSubgradient raw);

}  // namespace ehctrl
