#pragma once

#include "ehctrl/sim_config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace ehctrl {

/// Builds a SimConfig from the JSON config document. Keys that are absent
/// keep the two-plant default set-up; unknown keys are rejected.
/// Throws ConfigError on any malformed or invalid entry.
SimConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a config file.
nlohmann::json read_config_document(const std::filesystem::path& path);
SimConfig load_config(const std::filesystem::path& path);

/// Plant description: a_open, a_closed, rho, optional lyapunov, noise_cov,
/// x0. Matrices are numbers (1x1, or scalar * I when another entry fixes the
/// dimension) or nested row arrays.
PlantSetup parse_plant(const nlohmann::json& node);

/// Canonical echo of a config (what was actually run).
nlohmann::json to_json(const SimConfig& config);

/// Sets `dotted` (e.g. "energy.harvest.mean") inside a config document.
void set_config_value(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

}  // namespace ehctrl
