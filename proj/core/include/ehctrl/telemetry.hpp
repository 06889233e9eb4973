#pragma once

#include "ehctrl/control_model.hpp"

#include <cstdint>
#include <vector>

namespace ehctrl {

struct SimConfig;

/// What one node saw and did in one slot. State-like fields (x, V, b and
/// the duals) are the values at the start of the slot, i.e. the ones the
/// decisions were computed from.
struct NodeSlotRecord {
    Vector x;
    double lyapunov = 0.0;
    double z = 0.0;
    bool transmitted = false;
    bool collided = false;
    bool gamma = false;
    double h = 0.0;
    double q = 0.0;
    double charge = 0.0;
    double harvest = 0.0;
    double phi = 0.0;
    std::vector<double> nu;        ///< own row nu_i.
    double beta = 0.0;
    std::vector<double> nu_stale;  ///< copies of nu_ji used for z (entry i is 0)
    double reception_prob = 0.0;   ///< q_i z_i prod_{j != i}(1 - q_c z_j)
};

struct SlotRecord {
    std::uint64_t slot = 0;
    std::vector<NodeSlotRecord> nodes;
};

/// Receives the per-slot stream of a run.
class TelemetrySink {
public:
    virtual ~TelemetrySink() = default;
    virtual void record(const SlotRecord& slot) = 0;
};

/// Keeps every record in memory.
class MemoryTelemetry final : public TelemetrySink {
public:
    void record(const SlotRecord& slot) override { records.push_back(slot); }
    std::vector<SlotRecord> records;
};

struct NodeSummary {
    double required = 0.0;
    double ctrl_perf = 0.0;        ///< (1/T) sum V(x[t])
    double ctrl_bound = 0.0;       ///< tr(PC) / (1 - rho)
    double p_tx = 0.0;             ///< (1/T) sum z
    double p_rx = 0.0;             ///< (1/T) sum q z prod(1 - q_c z_j)
    double p_rx_empirical = 0.0;   ///< (1/T) sum gamma
    double energy_balance = 0.0;   ///< (1/T) sum (e - z)
    double phi_mean = 0.0;
    double beta_mean = 0.0;
    std::vector<double> nu_mean;
    std::vector<double> nu_max;
    double final_charge = 0.0;
    std::uint64_t transmissions = 0;
    std::uint64_t collisions = 0;
    std::uint64_t cap_triggers = 0;  ///< slots with some nu_ij above its cap
    std::uint64_t cap_resets = 0;    ///< triggered multipliers projected back to zero
    std::uint64_t causality_violations = 0;
    std::uint64_t dual_cap_violations = 0;
    std::uint64_t mirror_violations = 0;
    double mirror_max_error = 0.0;
};

struct Summary {
    std::uint64_t slots = 0;
    std::uint64_t seed = 0;
    std::vector<NodeSummary> nodes;  ///< empty for a zero-length run
};

/// Running means over a stream of slot records.
class RunningAverages {
public:
    explicit RunningAverages(std::size_t nodes);

    void add(const SlotRecord& slot);

    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

    struct Means {
        double ctrl_perf = 0.0;
        double p_tx = 0.0;
        double p_rx = 0.0;
        double p_rx_empirical = 0.0;
        double energy_balance = 0.0;
        double phi = 0.0;
        double beta = 0.0;
        std::vector<double> nu;
    };
    [[nodiscard]] Means means(std::size_t node) const;
    [[nodiscard]] const std::vector<double>& nu_max(std::size_t node) const { return sums_[node].nu_max; }
    [[nodiscard]] std::uint64_t transmissions(std::size_t node) const { return sums_[node].tx; }
    [[nodiscard]] std::uint64_t collisions(std::size_t node) const { return sums_[node].collided; }

private:
    struct Sums {
        double lyapunov = 0.0, z = 0.0, p_rx = 0.0, gamma = 0.0, balance = 0.0, phi = 0.0, beta = 0.0;
        std::vector<double> nu;
        std::vector<double> nu_max;
        std::uint64_t tx = 0, collided = 0;
    };
    std::vector<Sums> sums_;
    std::uint64_t count_ = 0;
};

/// Summary table of a finished run from its recorded telemetry. Battery
/// and invariant counters that are not visible in the records (final
/// charge, cap events, mirror error) are left at zero.
Summary summarize(const SimConfig& config, const std::vector<SlotRecord>& records);

}  // namespace ehctrl
