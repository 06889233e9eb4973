#include "ehctrl/sim_config.hpp"

#include "ehctrl/errors.hpp"

namespace ehctrl {

void SimConfig::validate() const {
    const std::size_t m = nodes();
    if (m < 1) throw ConfigError("at least one plant is required");
    for (std::size_t i = 0; i < m; ++i) {
        if (plants[i].x0.size() != plants[i].model.dim()) {
            throw ConfigError("plant " + std::to_string(i + 1) + ": x0 has the wrong dimension");
        }
        if (!plants[i].x0.allFinite()) throw ConfigError("plant " + std::to_string(i + 1) + ": x0 not finite");
    }
    channel.validate();
    if (energy.size() != m) throw ConfigError("one energy set-up per node is required");
    for (const NodeEnergy& e : energy) {
        e.harvest.validate();
        if (!(e.capacity > 0.0)) throw ConfigError("battery capacity must be positive");
        if (!(e.initial_charge >= 0.0 && e.initial_charge <= e.capacity)) {
            throw ConfigError("initial charge must lie in [0, capacity]");
        }
    }
    if (scheduler.nodes() != m) throw ConfigError("scheduler must have one requirement per plant");
    scheduler.validate();
    if (scheduler.collision_prob != channel.collision_prob) {
        throw ConfigError("scheduler and channel disagree on the collision probability");
    }
    availability.validate();
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (telemetry.window_end < telemetry.window_begin) {
        throw ConfigError("schedule window end precedes its start");
    }
}

std::vector<SizingIssue> SimConfig::sizing_issues() const {
    std::vector<double> caps;
    caps.reserve(energy.size());
    for (const NodeEnergy& e : energy) caps.push_back(e.capacity);
    return check_sizing(scheduler, caps);
}

std::vector<double> required_probabilities(const std::vector<PlantSetup>& plants, double tol) {
    std::vector<double> p;
    p.reserve(plants.size());
    for (const PlantSetup& plant : plants) p.push_back(required_reception_probability(plant.model, tol));
    return p;
}

SimConfig SimConfig::reference_default() {
    SimConfig cfg;
    cfg.horizon = 10000;
    cfg.seed = 1;
    cfg.plants = {PlantSetup{PlantModel::scalar(1.1, 0.15, 0.8), Vector::Zero(1)},
                  PlantSetup{PlantModel::scalar(1.05, 0.1, 0.8), Vector::Zero(1)}};
    cfg.channel = ChannelConfig{2.0, DecodingCurve::exponential(1.0), 0.25};
    cfg.energy.assign(2, NodeEnergy{HarvestConfig{HarvestConfig::Distribution::bernoulli, 0.5}, 20.0, 20.0});
    cfg.scheduler = SchedulerParams::uniform(required_probabilities(cfg.plants), 1.0, 19.0, 25.0, 0.25);
    return cfg;
}

}  // namespace ehctrl
