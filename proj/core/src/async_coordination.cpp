#include "ehctrl/async_coordination.hpp"

#include "ehctrl/errors.hpp"

namespace ehctrl {

void AvailabilitySchedule::validate() const {
    if (max_staleness < 1) throw ConfigError("max staleness B must be at least 1");
    if (mode == Mode::random && !(prob >= 0.0 && prob <= 1.0)) {
        throw ConfigError("availability probability must lie in [0, 1]");
    }
}

AvailabilitySchedule::Mode AvailabilitySchedule::parse(const std::string& name) {
    if (name == "always-on") return Mode::always_on;
    if (name == "random") return Mode::random;
    if (name == "piggyback") return Mode::piggyback;
    throw ConfigError("unknown availability mode '" + name + "'");
}

std::string AvailabilitySchedule::name(Mode mode) {
    switch (mode) {
        case Mode::always_on: return "always-on";
        case Mode::random: return "random";
        case Mode::piggyback: return "piggyback";
    }
    return "unknown";
}

Availability Availability::all(std::size_t nodes) {
    return {std::vector<bool>(nodes, true), std::vector<bool>(nodes, true)};
}

AvailabilityGenerator::AvailabilityGenerator(AvailabilitySchedule schedule, std::size_t nodes)
    : schedule_(schedule), nodes_(nodes), last_exchange_(nodes * nodes, -1) {
    schedule_.validate();
}

Availability AvailabilityGenerator::advance(std::uint64_t slot, std::span<RandomStream> rng,
                                            const std::vector<bool>& transmitted) {
    Availability out;
    switch (schedule_.mode) {
        case AvailabilitySchedule::Mode::always_on:
            out = Availability::all(nodes_);
            break;
        case AvailabilitySchedule::Mode::random: {
            if (rng.size() != nodes_) throw ConfigError("random availability needs one stream per node");
            std::vector<bool> up(nodes_);
            for (std::size_t i = 0; i < nodes_; ++i) up[i] = bernoulli(rng[i], schedule_.prob);
            out = {up, up};
            break;
        }
        case AvailabilitySchedule::Mode::piggyback:
            if (transmitted.size() != nodes_) throw ConfigError("piggyback availability needs transmit flags");
            out = {transmitted, std::vector<bool>(nodes_, true)};
            break;
    }

    // forced refresh: a copy exchanged at the end of slot t is used from t + 1,
    // so it must not be older than B when used in slot + 1
    const auto t = static_cast<std::int64_t>(slot);
    const auto bound = static_cast<std::int64_t>(schedule_.max_staleness);
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            if (i == j) continue;
            if (!out.pair(i, j) && t + 1 - last(i, j) > bound) {
                out.sends[j] = true;
                out.receives[i] = true;
            }
        }
    }
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            if (i != j && out.pair(i, j)) last(i, j) = t;
        }
    }
    return out;
}

DualMailbox::DualMailbox(std::size_t nodes) : nodes_(nodes), entries_(nodes * nodes) {}

void DualMailbox::exchange(const Availability& availability, std::span<const NodeDualState> duals,
                           std::uint64_t slot) {
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            if (i == j || !availability.pair(i, j)) continue;
            Entry& e = entries_[i * nodes_ + j];
            e.value = duals[j].nu_own[i];
            e.last_slot = static_cast<std::int64_t>(slot);
        }
    }
}

void DualMailbox::deliver(std::span<NodeDualState> duals) const {
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            if (i != j) duals[i].nu_remote[j] = entries_[i * nodes_ + j].value;
        }
    }
}

DualSubgradient asynchronous_subgradient_mask(const Availability& availability, std::size_t node,
                                              DualSubgradient raw) {
    for (std::size_t j = 0; j < raw.nu.size(); ++j) {
        if (j != node && !availability.in_set(j)) raw.nu[j] = 0.0;
    }
    return raw;
}

}  // namespace ehctrl
