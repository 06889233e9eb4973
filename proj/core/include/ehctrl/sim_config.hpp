#pragma once

#include "ehctrl/async_coordination.hpp"
#include "ehctrl/comm_model.hpp"
#include "ehctrl/control_model.hpp"
#include "ehctrl/energy_model.hpp"
#include "ehctrl/scheduler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ehctrl {

enum class SchedulingPolicy {
    adaptive,         ///< primal-dual random access
    always_transmit,  ///< z = 1 every slot (duals still evolve); a baseline
};

struct PlantSetup {
    PlantModel model = PlantModel::scalar(1.1, 0.15, 0.8);
    Vector x0 = Vector::Zero(1);
};

struct NodeEnergy {
    HarvestConfig harvest;
    double capacity = 20.0;
    double initial_charge = 20.0;
};

struct TelemetryOptions {
    std::uint64_t window_begin = 1050;  ///< schedule extract, inclusive
    std::uint64_t window_end = 1100;    ///< inclusive
};

struct SimConfig {
    std::uint64_t horizon = 10000;
    std::uint64_t seed = 1;
    std::vector<PlantSetup> plants;
    ChannelConfig channel;
    std::vector<NodeEnergy> energy;
    EnergyAccounting accounting = EnergyAccounting::fluid;
    SchedulerParams scheduler;
    SchedulingPolicy policy = SchedulingPolicy::adaptive;
    AvailabilitySchedule availability;
    std::size_t threads = 1;
    bool strict = false;
    TelemetryOptions telemetry;

    [[nodiscard]] std::size_t nodes() const noexcept { return plants.size(); }

    /// Structural validation of every sub-config. Throws ConfigError.
    void validate() const;

    /// Sizing rules for the multiplier bound and energy causality.
    [[nodiscard]] std::vector<SizingIssue> sizing_issues() const;

    /// Two-plant scalar set-up: A_o = (1.1, 1.05), A_c = (0.15, 0.1),
    /// rho = 0.8, P = C = 1, Exp(2) fading, q_c = 0.25, Bernoulli(0.5)
    /// harvesting, 20-unit batteries, y_cap = 25, nu_cap = 19, step 1,
    /// 10^4 slots.
    static SimConfig reference_default();
};

/// Required reception probabilities for every plant (closed form / bisection).
std::vector<double> required_probabilities(const std::vector<PlantSetup>& plants,
                                           double tol = 1e-6);

}  // namespace ehctrl
