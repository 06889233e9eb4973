#include "ehctrl/energy_model.hpp"

#include "ehctrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehctrl {

void HarvestConfig::validate() const {
    if (!std::isfinite(mean)) throw ConfigError("harvest mean must be finite");
    if (distribution == Distribution::none) return;
    if (!(mean > 0.0)) throw ConfigError("harvest mean must be positive");
    if (distribution == Distribution::bernoulli && mean > 1.0) {
        throw ConfigError("bernoulli harvest needs mean <= 1");
    }
}

HarvestConfig::Distribution HarvestConfig::parse(const std::string& name) {
    if (name == "bernoulli") return Distribution::bernoulli;
    if (name == "deterministic") return Distribution::deterministic;
    if (name == "uniform") return Distribution::uniform;
    if (name == "none") return Distribution::none;
    throw ConfigError("unknown harvest distribution '" + name + "'");
}

std::string HarvestConfig::name(Distribution d) {
    switch (d) {
        case Distribution::bernoulli: return "bernoulli";
        case Distribution::deterministic: return "deterministic";
        case Distribution::uniform: return "uniform";
        case Distribution::none: return "none";
    }
    return "unknown";
}

double draw_harvest(const HarvestConfig& config, RandomStream& rng) {
    switch (config.distribution) {
        case HarvestConfig::Distribution::bernoulli: return bernoulli(rng, config.mean) ? 1.0 : 0.0;
        case HarvestConfig::Distribution::deterministic: return config.mean;
        case HarvestConfig::Distribution::uniform: return 2.0 * config.mean * uniform01(rng);
        case HarvestConfig::Distribution::none: return 0.0;
    }
    return 0.0;
}

BatteryState step_battery(const BatteryState& state, double spend, double harvest,
                          std::optional<std::uint64_t> slot, std::optional<std::size_t> node) {
    if (!(spend >= 0.0) || !(harvest >= 0.0)) {
        throw InvariantViolation("battery step with negative or non-finite energy", slot, node);
    }
    if (spend > state.charge) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "energy causality violated: spend " << spend << " exceeds charge " << state.charge;
        throw CausalityViolation(msg.str(), slot, node);
    }
    return {std::clamp(state.charge - spend + harvest, 0.0, state.capacity), state.capacity};
}

EnergyAccounting parse_accounting(const std::string& name) {
    if (name == "fluid") return EnergyAccounting::fluid;
    if (name == "per-transmission") return EnergyAccounting::per_transmission;
    throw ConfigError("unknown energy accounting '" + name + "'");
}

std::string accounting_name(EnergyAccounting a) {
    return a == EnergyAccounting::fluid ? "fluid" : "per-transmission";
}

}  // namespace ehctrl
