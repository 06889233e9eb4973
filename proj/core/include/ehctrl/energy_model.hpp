#pragma once

#include "ehctrl/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ehctrl {

/// Per-slot energy arrival process.
struct HarvestConfig {
    enum class Distribution {
        bernoulli,      ///< e in {0, 1}, Pr(e = 1) = mean; needs mean <= 1
        deterministic,  ///< e = mean every slot
        uniform,        ///< e ~ U[0, 2 mean]
        none,           ///< no harvesting at all (e = 0)
    };

    Distribution distribution = Distribution::bernoulli;
    double mean = 0.5;

    /// Rejects non-positive means for every distribution except `none`.
    void validate() const;

    static Distribution parse(const std::string& name);
    static std::string name(Distribution d);
};

double draw_harvest(const HarvestConfig& config, RandomStream& rng);

struct BatteryState {
    double charge = 0.0;
    double capacity = 0.0;
};

/// b' = clamp(b - spend + harvest, 0, capacity).
///
/// Spending more than the stored charge is a causality violation and throws
/// CausalityViolation (stamped with `slot`/`node` when given) rather than
/// clamping.
BatteryState step_battery(const BatteryState& state, double spend, double harvest,
                          std::optional<std::uint64_t> slot = std::nullopt,
                          std::optional<std::size_t> node = std::nullopt);

/// How a slot's energy use is charged to the battery.
enum class EnergyAccounting {
    fluid,             ///< battery pays the scheduling probability z each slot
    per_transmission,  ///< battery pays one unit only when a packet is sent
};

EnergyAccounting parse_accounting(const std::string& name);
std::string accounting_name(EnergyAccounting a);

}  // namespace ehctrl
