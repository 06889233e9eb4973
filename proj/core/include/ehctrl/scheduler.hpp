#pragma once

#include "ehctrl/control_model.hpp"
#include "ehctrl/energy_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace ehctrl {

/// Tuning of the per-node primal-dual random access policy.
struct SchedulerParams {
    double step = 1.0;                  ///< dual step size epsilon
    Matrix nu_cap;                      ///< M x M multiplier caps (nu bar)
    Matrix y_cap;                       ///< M x M auxiliary-variable caps (y bar)
    std::vector<double> required;       ///< per-node reception requirement p_i in [0, 1)
    double collision_prob = 0.25;       ///< q_c
    double s_floor = 1e-6;              ///< keeps log(s_ii), log(1 - s_ij) finite

    /// Same caps for every (i, j) pair.
    static SchedulerParams uniform(std::vector<double> required, double step, double nu_cap,
                                   double y_cap, double collision_prob, double s_floor = 1e-6);

    [[nodiscard]] std::size_t nodes() const noexcept { return required.size(); }

    /// Structural checks only; cap sizing is reported by check_sizing.
    void validate() const;
};

/// Dual variables held by one sensor. The node owns phi, beta and its row
/// nu_own[j] = nu_ij; nu_remote[j] is its last received copy of nu_ji
/// (entry `node` unused).
struct NodeDualState {
    std::size_t node = 0;
    double phi = 0.0;
    std::vector<double> nu_own;
    std::vector<double> nu_remote;
    double beta = 0.0;
};

/// Primal decisions of one node for one slot. Entries s_cross[node] and
/// y[node] follow the same indexing as nu_own (s_cross[node] unused).
struct NodePrimal {
    double z = 0.0;
    double s_own = 1.0;
    std::vector<double> s_cross;
    std::vector<double> y;
};

struct SlotObservation {
    double q = 0.0;        ///< decode probability of the node's own link
    double harvest = 0.0;  ///< energy harvested this slot
};

/// Stochastic subgradient of the dual function for one node's variables.
struct DualSubgradient {
    double phi = 0.0;
    std::vector<double> nu;
    double beta = 0.0;
};

struct SValues {
    double own = 1.0;
    std::vector<double> cross;
};

/// Transmit probability: argmin over z in [0,1] of z (z - c) with
/// c = nu_ii q - q_c sum_{j != i} nu_ji - beta, i.e. clamp(c / 2, 0, 1).
double compute_z(const NodeDualState& duals, double q, const SchedulerParams& params);

/// s_ii = clamp(phi / nu_ii, s_floor, 1), s_ij = clamp(1 - phi / nu_ij, 0, 1 - s_floor);
/// a zero multiplier takes the limit (s_ii = 1, s_ij = 0).
SValues compute_s(const NodeDualState& duals, const SchedulerParams& params);

/// y_ij = y_cap_ij when nu_ij > nu_cap_ij, otherwise 0.
std::vector<double> compute_y(const NodeDualState& duals, const SchedulerParams& params);

NodePrimal compute_primal(const NodeDualState& duals, double q, const SchedulerParams& params);

DualSubgradient dual_subgradient(const NodeDualState& duals, const NodePrimal& primal,
                                 const SlotObservation& obs, const SchedulerParams& params);

/// lambda' = [lambda + step * g]^+ on the node's own variables; remote copies
/// are left untouched.
NodeDualState apply_subgradient(const NodeDualState& duals, const DualSubgradient& g,
                                const SchedulerParams& params);

/// Synchronous dual ascent step (no masking).
NodeDualState update_duals(const NodeDualState& duals, const NodePrimal& primal,
                           const SlotObservation& obs, const SchedulerParams& params);

/// phi = 0, nu = 0, beta = step * (capacity - charge), remote copies zero.
NodeDualState init_duals(std::size_t node, const BatteryState& battery,
                         const SchedulerParams& params);

struct SizingIssue {
    std::string rule;
    std::size_t i = 0;
    std::size_t j = 0;
    double required = 0.0;
    double actual = 0.0;
    std::string message;
};

/// Cap and battery sizing rules that make the multiplier bound and per-slot
/// energy causality hold:
///   y_cap_ij >= (nu_cap_ij + 2 step) / step
///   capacity_i >= nu_cap_ii / step + 1
///   step <= 2  (z = c / 2 <= step * b / 2 needs this to stay below b)
std::vector<SizingIssue> check_sizing(const SchedulerParams& params,
                                      std::span<const double> capacities);

}  // namespace ehctrl
