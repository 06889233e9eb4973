#include "ehctrl/telemetry.hpp"

#include "ehctrl/sim_config.hpp"

#include <algorithm>

namespace ehctrl {

RunningAverages::RunningAverages(std::size_t nodes) : sums_(nodes) {
    for (Sums& s : sums_) {
        s.nu.assign(nodes, 0.0);
        s.nu_max.assign(nodes, 0.0);
    }
}

void RunningAverages::add(const SlotRecord& slot) {
    for (std::size_t i = 0; i < sums_.size(); ++i) {
        const NodeSlotRecord& r = slot.nodes[i];
        Sums& s = sums_[i];
        s.lyapunov += r.lyapunov;
        s.z += r.z;
        s.p_rx += r.reception_prob;
        s.gamma += r.gamma ? 1.0 : 0.0;
        s.balance += r.harvest - r.z;
        s.phi += r.phi;
        s.beta += r.beta;
        for (std::size_t j = 0; j < s.nu.size(); ++j) {
            s.nu[j] += r.nu[j];
            s.nu_max[j] = std::max(s.nu_max[j], r.nu[j]);
        }
        s.tx += r.transmitted ? 1 : 0;
        s.collided += r.collided ? 1 : 0;
    }
    ++count_;
}

RunningAverages::Means RunningAverages::means(std::size_t node) const {
    Means m;
    const Sums& s = sums_[node];
    m.nu.assign(s.nu.size(), 0.0);
    if (count_ == 0) return m;
    const auto n = static_cast<double>(count_);
    m.ctrl_perf = s.lyapunov / n;
    m.p_tx = s.z / n;
    m.p_rx = s.p_rx / n;
    m.p_rx_empirical = s.gamma / n;
    m.energy_balance = s.balance / n;
    m.phi = s.phi / n;
    m.beta = s.beta / n;
    for (std::size_t j = 0; j < s.nu.size(); ++j) m.nu[j] = s.nu[j] / n;
    return m;
}

Summary summarize(const SimConfig& config, const std::vector<SlotRecord>& records) {
    Summary out;
    out.slots = records.size();
    out.seed = config.seed;
    if (records.empty()) return out;

    const std::size_t m = config.nodes();
    RunningAverages avg(m);
    for (const SlotRecord& r : records) avg.add(r);
    out.nodes.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto means = avg.means(i);
        NodeSummary& n = out.nodes[i];
        n.required = config.scheduler.required[i];
        n.ctrl_perf = means.ctrl_perf;
        n.ctrl_bound = control_performance_bound(config.plants[i].model);
        n.p_tx = means.p_tx;
        n.p_rx = means.p_rx;
        n.p_rx_empirical = means.p_rx_empirical;
        n.energy_balance = means.energy_balance;
        n.phi_mean = means.phi;
        n.beta_mean = means.beta;
        n.nu_mean = means.nu;
        n.nu_max = avg.nu_max(i);
        n.transmissions = avg.transmissions(i);
        n.collisions = avg.collisions(i);
    }
    return out;
}

}  // namespace ehctrl
