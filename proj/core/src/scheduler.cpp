#include "ehctrl/scheduler.hpp"

#include "ehctrl/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

namespace ehctrl {

SchedulerParams SchedulerParams::uniform(std::vector<double> required, double step, double nu_cap,
                                         double y_cap, double collision_prob, double s_floor) {
    const auto m = static_cast<Eigen::Index>(required.size());
    SchedulerParams p;
    p.step = step;
    p.nu_cap = Matrix::Constant(m, m, nu_cap);
    p.y_cap = Matrix::Constant(m, m, y_cap);
    p.required = std::move(required);
    p.collision_prob = collision_prob;
    p.s_floor = s_floor;
    return p;
}

void SchedulerParams::validate() const {
    const auto m = static_cast<Eigen::Index>(nodes());
    if (m < 1) throw ConfigError("scheduler needs at least one node");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step size must be positive");
    if (nu_cap.rows() != m || nu_cap.cols() != m || y_cap.rows() != m || y_cap.cols() != m) {
        throw ConfigError("nu_cap and y_cap must be M x M");
    }
    if (!(nu_cap.array() > 0.0).all() || !nu_cap.allFinite()) {
        throw ConfigError("nu_cap entries must be positive");
    }
    if (!(y_cap.array() > 0.0).all() || !y_cap.allFinite()) {
        throw ConfigError("y_cap entries must be positive");
    }
    for (double p : required) {
        if (!(p >= 0.0 && p < 1.0)) throw ConfigError("required probabilities must lie in [0, 1)");
    }
    if (!(collision_prob >= 0.0 && collision_prob <= 1.0)) {
        throw ConfigError("collision probability must lie in [0, 1]");
    }
    if (!(s_floor > 0.0 && s_floor <= 0.01)) throw ConfigError("s_floor must lie in (0, 0.01]");
}

double compute_z(const NodeDualState& duals, double q, const SchedulerParams& params) {
    const std::size_t i = duals.node;
    double interference = 0.0;
    for (std::size_t j = 0; j < duals.nu_remote.size(); ++j) {
        if (j != i) interference += duals.nu_remote[j];
    }
    const double c = duals.nu_own[i] * q - params.collision_prob * interference - duals.beta;
    // halve first, then clip: the minimiser of z (z - c) over [0, 1]
    return std::clamp(0.5 * c, 0.0, 1.0);
}

SValues compute_s(const NodeDualState& duals, const SchedulerParams& params) {
    const std::size_t i = duals.node;
    const std::size_t m = duals.nu_own.size();
    SValues s;
    s.cross.assign(m, 0.0);

    const double nu_ii = duals.nu_own[i];
    s.own = nu_ii > 0.0 ? std::clamp(duals.phi / nu_ii, params.s_floor, 1.0) : 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double nu_ij = duals.nu_own[j];
        s.cross[j] =
            nu_ij > 0.0 ? std::clamp(1.0 - duals.phi / nu_ij, 0.0, 1.0 - params.s_floor) : 0.0;
    }
    return s;
}

std::vector<double> compute_y(const NodeDualState& duals, const SchedulerParams& params) {
    const auto i = static_cast<Eigen::Index>(duals.node);
    std::vector<double> y(duals.nu_own.size(), 0.0);
    for (std::size_t j = 0; j < y.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (duals.nu_own[j] > params.nu_cap(i, jj)) y[j] = params.y_cap(i, jj);
    }
    return y;
}

NodePrimal compute_primal(const NodeDualState& duals, double q, const SchedulerParams& params) {
    NodePrimal primal;
    primal.y = compute_y(duals, params);
    SValues s = compute_s(duals, params);
    primal.s_own = s.own;
    primal.s_cross = std::move(s.cross);
    primal.z = compute_z(duals, q, params);
    return primal;
}

DualSubgradient dual_subgradient(const NodeDualState& duals, const NodePrimal& primal,
                                 const SlotObservation& obs, const SchedulerParams& params) {
    const std::size_t i = duals.node;
    const std::size_t m = duals.nu_own.size();
    assert(primal.s_own > 0.0);

    DualSubgradient g;
    const double p = params.required[i];
    // p = 0 means no requirement: log(0) = -inf pins phi at zero after projection
    double phi_g = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    phi_g -= std::log(primal.s_own);
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        assert(primal.s_cross[j] < 1.0);
        phi_g -= std::log1p(-primal.s_cross[j]);
    }
    g.phi = phi_g;

    g.nu.assign(m, 0.0);
    g.nu[i] = primal.s_own - primal.z * obs.q - primal.y[i];
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        g.nu[j] = params.collision_prob * primal.z - primal.s_cross[j] - primal.y[j];
    }
    g.beta = primal.z - obs.harvest;
    return g;
}

NodeDualState apply_subgradient(const NodeDualState& duals, const DualSubgradient& g,
                                const SchedulerParams& params) {
    const double eps = params.step;
    NodeDualState next = duals;
    next.phi = std::max(duals.phi + eps * g.phi, 0.0);
    for (std::size_t j = 0; j < next.nu_own.size(); ++j) {
        next.nu_own[j] = std::max(duals.nu_own[j] + eps * g.nu[j], 0.0);
    }
    next.beta = std::max(duals.beta + eps * g.beta, 0.0);
    return next;
}

NodeDualState update_duals(const NodeDualState& duals, const NodePrimal& primal,
                           const SlotObservation& obs, const SchedulerParams& params) {
    return apply_subgradient(duals, dual_subgradient(duals, primal, obs, params), params);
}

NodeDualState init_duals(std::size_t node, const BatteryState& battery,
                         const SchedulerParams& params) {
    NodeDualState d;
    d.node = node;
    d.nu_own.assign(params.nodes(), 0.0);
    d.nu_remote.assign(params.nodes(), 0.0);
    d.beta = params.step * (battery.capacity - battery.charge);
    return d;
}

std::vector<SizingIssue> check_sizing(const SchedulerParams& params,
                                      std::span<const double> capacities) {
    std::vector<SizingIssue> issues;
    const double eps = params.step;
    const auto m = static_cast<Eigen::Index>(params.nodes());
    auto short_of = [](double actual, double required) {
        return actual < required - 1e-9 * std::max(1.0, std::abs(required));
    };
    auto describe = [](const char* what, double required, double actual) {
        std::ostringstream os;
        os << what << ": need >= " << required << ", have " << actual;
        return os.str();
    };

    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double need = (params.nu_cap(i, j) + 2.0 * eps) / eps;
            if (short_of(params.y_cap(i, j), need)) {
                issues.push_back({"y_cap", static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                  need, params.y_cap(i, j),
                                  describe("auxiliary cap y_cap", need, params.y_cap(i, j))});
            }
        }
        if (static_cast<std::size_t>(i) < capacities.size()) {
            const double need = params.nu_cap(i, i) / eps + 1.0;
            const double have = capacities[static_cast<std::size_t>(i)];
            if (short_of(have, need)) {
                issues.push_back({"battery_capacity", static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(i), need, have,
                                  describe("battery capacity", need, have)});
            }
        }
    }
    if (eps > 2.0) {
        issues.push_back({"step_size", 0, 0, 2.0, eps, "step size must be <= 2, have " +
                                                           std::to_string(eps)});
    }
    return issues;
}

}  // namespace ehctrl
