#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ehctrl {

/// Malformed or inconsistent input (configuration, model matrices, CLI
/// arguments). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The closed loop cannot reach the requested Lyapunov decrease rate even
/// with every packet received.
class InfeasibleRateError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A run-time invariant broke mid-simulation (energy causality, non-finite
/// plant state, battery/multiplier mirror divergence, dual cap).
/// The CLI maps this to exit code 3.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string what, std::optional<std::uint64_t> slot = std::nullopt,
                       std::optional<std::size_t> node = std::nullopt)
        : std::runtime_error(format(what, slot, node)), slot_(slot), node_(node) {}

    [[nodiscard]] std::optional<std::uint64_t> slot() const noexcept { return slot_; }
    [[nodiscard]] std::optional<std::size_t> node() const noexcept { return node_; }

private:
    static std::string format(const std::string& what, std::optional<std::uint64_t> slot,
                              std::optional<std::size_t> node) {
        std::string out;
        if (slot) out += "slot " + std::to_string(*slot) + ": ";
        if (node) out += "node " + std::to_string(*node + 1) + ": ";
        return out + what;
    }

    std::optional<std::uint64_t> slot_;
    std::optional<std::size_t> node_;
};

/// Battery asked to spend more than it holds.
class CausalityViolation : public InvariantViolation {
public:
    using InvariantViolation::InvariantViolation;
};

}  // namespace ehctrl
