#include "ehctrl/control_model.hpp"
#include "ehctrl/scheduler.hpp"
#include "ehctrl/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace ehctrl;

static void slot_loop(benchmark::State& state) {
    SimConfig c = SimConfig::reference_default();
    c.horizon = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run(c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(slot_loop)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void slot_loop_piggyback(benchmark::State& state) {
    SimConfig c = SimConfig::reference_default();
    c.horizon = 10000;
    c.availability = {AvailabilitySchedule::Mode::piggyback, 0.5, 10};
    for (auto _ : state) benchmark::DoNotOptimize(run(c));
}
BENCHMARK(slot_loop_piggyback)->Unit(benchmark::kMillisecond);

static void bisection_2x2(benchmark::State& state) {
    Matrix ao(2, 2);
    ao << 1.05, 0.1, 0.0, 1.05;
    const PlantModel m(0.1 * Matrix::Identity(2, 2), ao, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(required_reception_probability(m));
}
BENCHMARK(bisection_2x2);

static void scheduler_step(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto params = SchedulerParams::uniform(std::vector<double>(m, 0.3), 1.0, 19.0, 25.0, 0.25);
    NodeDualState d = init_duals(0, {15.0, 20.0}, params);
    for (std::size_t j = 0; j < m; ++j) {
        d.nu_own[j] = 3.0 + static_cast<double>(j);
        d.nu_remote[j] = j == 0 ? 0.0 : 1.5;
    }
    d.phi = 1.0;
    for (auto _ : state) {
        const NodePrimal p = compute_primal(d, 0.6, params);
        benchmark::DoNotOptimize(update_duals(d, p, {0.6, 1.0}, params));
    }
}
BENCHMARK(scheduler_step)->Arg(2)->Arg(16);

BENCHMARK_MAIN();
