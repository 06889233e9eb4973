#include "ehctrl/simulator.hpp"

#include "ehctrl/errors.hpp"

#include <tbb/parallel_for.h>
#include <tbb/info.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

namespace ehctrl {

namespace {

struct NodeStreams {
    RandomStream channel, harvest, transmission, noise;
};

class NodeLoop {
public:
    NodeLoop(std::size_t threads, std::size_t nodes) : nodes_(nodes) {
        if (threads > 1) {
            const int width = std::min(static_cast<int>(threads), tbb::info::default_concurrency());
            arena_ = std::make_unique<tbb::task_arena>(std::max(width, 1));
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) {
        if (!arena_) {
            for (std::size_t i = 0; i < nodes_; ++i) fn(i);
            return;
        }
        arena_->execute([&] { tbb::parallel_for(std::size_t{0}, nodes_, fn); });
    }

private:
    std::size_t nodes_;
    std::unique_ptr<tbb::task_arena> arena_;
};

std::string sizing_message(const std::vector<SizingIssue>& issues) {
    std::ostringstream os;
    os << "sizing rules violated:";
    for (const SizingIssue& s : issues) os << " [" << s.rule << " (" << s.i + 1 << "," << s.j + 1 << ") " << s.message << "]";
    return os.str();
}

}  // namespace

Summary run(const SimConfig& config, TelemetrySink* sink) {
    config.validate();
    const std::vector<SizingIssue> issues = config.sizing_issues();
    if (config.strict && !issues.empty()) throw ConfigError(sizing_message(issues));
    const bool caps_proven = issues.empty();

    const std::size_t m = config.nodes();
    const SchedulerParams& params = config.scheduler;
    const double eps = params.step;
    const StreamFactory factory(config.seed);

    std::vector<NodeStreams> streams;
    streams.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        streams.push_back({factory.make(StreamId::channel, i), factory.make(StreamId::harvest, i),
                           factory.make(StreamId::transmission, i), factory.make(StreamId::noise, i)});
    }
    std::vector<RandomStream> collision_rng, decode_rng, availability_rng;
    for (std::size_t i = 0; i < m; ++i) {
        collision_rng.push_back(factory.make(StreamId::collision, i));
        decode_rng.push_back(factory.make(StreamId::decoding, i));
        availability_rng.push_back(factory.make(StreamId::availability, i));
    }
    std::vector<std::normal_distribution<double>> gauss(m);
    const ExponentialFading fading(config.channel.fading_mean);

    std::vector<PlantState> plants(m);
    std::vector<BatteryState> batteries(m);
    std::vector<NodeDualState> duals(m);
    for (std::size_t i = 0; i < m; ++i) {
        plants[i] = PlantState{config.plants[i].x0, 0};
        batteries[i] = BatteryState{config.energy[i].initial_charge, config.energy[i].capacity};
        duals[i] = init_duals(i, batteries[i], params);
    }

    AvailabilityGenerator availability(config.availability, m);
    DualMailbox mailbox(m);
    RunningAverages averages(m);
    NodeLoop loop(config.threads, m);

    Summary summary;
    summary.seed = config.seed;
    std::vector<NodeSummary> extra(m);
    for (NodeSummary& n : extra) n.nu_max.assign(m, 0.0);

    std::vector<ChannelDraw> channel(m);
    std::vector<double> harvest(m), q(m), z(m);
    std::vector<NodePrimal> primal(m);
    std::vector<bool> transmitted(m);
    SlotRecord record;
    record.nodes.resize(m);

    for (std::uint64_t t = 0; t < config.horizon; ++t) {
        // 1
        for (std::size_t i = 0; i < m; ++i) {
            channel[i] = draw_channel(fading, config.channel.decode, streams[i].channel);
            q[i] = channel[i].q;
            harvest[i] = draw_harvest(config.energy[i].harvest, streams[i].harvest);
        }

        // 2
        loop.for_each([&](std::size_t i) {
            primal[i] = compute_primal(duals[i], q[i], params);
            if (config.policy == SchedulingPolicy::always_transmit) primal[i].z = 1.0;
            z[i] = primal[i].z;
        });

        // 3
        for (std::size_t i = 0; i < m; ++i) {
            bool tx = uniform01(streams[i].transmission) < z[i];
            if (config.accounting == EnergyAccounting::per_transmission && batteries[i].charge < 1.0) {
                tx = false;
            }
            transmitted[i] = tx;
        }

        // 4
        const SlotOutcome outcome = resolve_slot(config.channel, transmitted, q, collision_rng, decode_rng);

        for (std::size_t i = 0; i < m; ++i) {
            NodeSlotRecord& r = record.nodes[i];
            r.x = plants[i].x;
            r.lyapunov = lyapunov_value(config.plants[i].model, plants[i]);
            if (!std::isfinite(r.lyapunov)) {
                throw InvariantViolation("Lyapunov value is not finite", t, i);
            }
            r.z = z[i];
            r.transmitted = outcome.links[i].transmitted;
            r.collided = outcome.links[i].collided;
            r.gamma = outcome.links[i].gamma;
            r.h = channel[i].h;
            r.q = q[i];
            r.charge = batteries[i].charge;
            r.harvest = harvest[i];
            r.phi = duals[i].phi;
            r.nu = duals[i].nu_own;
            r.beta = duals[i].beta;
            r.nu_stale = duals[i].nu_remote;
            r.nu_stale[i] = 0.0;
            r.reception_prob = reception_probability(z, q, config.channel.collision_prob, i);
        }
        record.slot = t;

        for (std::size_t i = 0; i < m; ++i) {
            // 5
            Vector w = config.plants[i].model.noise_factor() *
                       Vector::NullaryExpr(config.plants[i].model.dim(),
                                           [&](Eigen::Index) { return gauss[i](streams[i].noise); });
            plants[i] = step_plant(config.plants[i].model, plants[i], outcome.links[i].gamma, w);
            // 6
            const double spend = config.accounting == EnergyAccounting::fluid
                                     ? z[i]
                                     : (outcome.links[i].transmitted ? 1.0 : 0.0);
            batteries[i] = step_battery(batteries[i], spend, harvest[i], t, i);
        }

        // 7
        const Availability avail = availability.advance(t, availability_rng, transmitted);
        std::vector<NodeDualState> before;
        before.reserve(m);
        for (const NodeDualState& d : duals) before.push_back(d);
        loop.for_each([&](std::size_t i) {
            const SlotObservation obs{q[i], harvest[i]};
            DualSubgradient g = dual_subgradient(before[i], primal[i], obs, params);
            g = asynchronous_subgradient_mask(avail, i, std::move(g));
            duals[i] = apply_subgradient(before[i], g, params);
        });

        for (std::size_t i = 0; i < m; ++i) {
            NodeSummary& x = extra[i];
            bool triggered = false;
            for (std::size_t j = 0; j < m; ++j) {
                const auto ii = static_cast<Eigen::Index>(i);
                const auto jj = static_cast<Eigen::Index>(j);
                const double cap = params.nu_cap(ii, jj);
                if (before[i].nu_own[j] > cap) {
                    triggered = true;
                    if (duals[i].nu_own[j] == 0.0) ++x.cap_resets;
                }
                x.nu_max[j] = std::max({x.nu_max[j], before[i].nu_own[j], duals[i].nu_own[j]});
                if (duals[i].nu_own[j] > cap + eps + 1e-12 * std::max(1.0, cap)) {
                    ++x.dual_cap_violations;
                    if (caps_proven) {
                        std::ostringstream msg;
                        msg.precision(17);
                        msg << "multiplier nu_" << i + 1 << j + 1 << " = " << duals[i].nu_own[j]
                            << " exceeds cap + step = " << cap + eps;
                        throw InvariantViolation(msg.str(), t, i);
                    }
                }
            }
            if (triggered) ++x.cap_triggers;

            if (config.accounting == EnergyAccounting::fluid) {
                const double mirror = std::abs(duals[i].beta - eps * (batteries[i].capacity - batteries[i].charge));
                x.mirror_max_error = std::max(x.mirror_max_error, mirror);
                if (mirror > kMirrorTolerance) {
                    ++x.mirror_violations;
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "battery multiplier no longer mirrors the battery: |beta - step (b_max - b)| = "
                        << mirror;
                    throw InvariantViolation(msg.str(), t, i);
                }
            }
        }

        // 8
        mailbox.exchange(avail, duals, t);
        mailbox.deliver(duals);

        // 9
        averages.add(record);
        if (sink) sink->record(record);
    }

    summary.slots = config.horizon;
    if (config.horizon == 0) return summary;

    summary.nodes.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto means = averages.means(i);
        NodeSummary& n = summary.nodes[i];
        n = extra[i];
        n.required = params.required[i];
        n.ctrl_perf = means.ctrl_perf;
        n.ctrl_bound = control_performance_bound(config.plants[i].model);
        n.p_tx = means.p_tx;
        n.p_rx = means.p_rx;
        n.p_rx_empirical = means.p_rx_empirical;
        n.energy_balance = means.energy_balance;
        n.phi_mean = means.phi;
        n.beta_mean = means.beta;
        n.nu_mean = means.nu;
        n.final_charge = batteries[i].charge;
        n.transmissions = averages.transmissions(i);
        n.collisions = averages.collisions(i);
    }
    return summary;
}

}  // namespace ehctrl
