#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ehctrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;

struct RunOptions {
    std::optional<std::filesystem::path> config;  ///< built-in two-plant set-up when empty
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::size_t> threads;
    std::filesystem::path out_dir = "ehctrl-out";
    bool strict = false;
};

struct RequiredProbOptions {
    std::optional<std::filesystem::path> config;  ///< every plant of a config
    std::optional<std::filesystem::path> plant;   ///< one plant description (JSON)
    std::optional<double> a_open;
    std::optional<double> a_closed;
    double rho = 0.8;
    double lyapunov = 1.0;
    double tol = 1e-6;
    int precision = 4;
};

struct CheckOptions {
    std::optional<std::filesystem::path> config;
    bool strict = false;
};

struct SweepOptions {
    RunOptions base;
    std::string param;  ///< dotted config key, e.g. energy.harvest.mean
    std::vector<double> values;
};

int cmd_run(const RunOptions& opts, std::ostream& out);
int cmd_required_prob(const RequiredProbOptions& opts, std::ostream& out);
int cmd_check_config(const CheckOptions& opts, std::ostream& out);
int cmd_sweep(const SweepOptions& opts, std::ostream& out);

/// Seed of sweep point `index`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Parses argv and dispatches; returns the process exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ehctrl::cli
