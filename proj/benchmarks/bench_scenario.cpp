#include "lineid/scenario.hpp"

#include <benchmark/benchmark.h>

using namespace lineid;

static void BM_PlantStep(benchmark::State& state) {
    const ScenarioConfig cfg = default_config();
    const GridSource grid = cfg.grid.source();
    const PllDesign pll = design_pi(cfg.primary_crossover_hz, cfg.grid.v_phase_peak(), cfg.primary_zero_ratio);
    NoiseSource noise(1);
    InverterState s = make_inverter_state(grid, cfg.tau_track);
    for (auto _ : state) {
        const PlantStep ps = plant_step(s, grid, cfg.line.initial, {3e3, 500.0}, pll, cfg.dt, &noise, 0.2, 0.0015);
        s = ps.state;
        benchmark::DoNotOptimize(ps.measured);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PlantStep);

static void BM_RegressorPush(benchmark::State& state) {
    const ScenarioConfig cfg = default_config();
    RegressorBuilder b(cfg.conditioning, cfg.dt);
    DqSample s{390.0, -1.0, 10.0, 2.0, 376.9, 0.0, 0.0};
    for (auto _ : state) {
        s.i_d += 1e-3;
        benchmark::DoNotOptimize(b.push(s));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RegressorPush);

static void BM_DefaultScenario(benchmark::State& state) {
    ScenarioConfig cfg = default_config();
    cfg.t_end = static_cast<double>(state.range(0));
    cfg.windows = {{1.0, cfg.t_end, "all"}};
    for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.step_count()));
}
BENCHMARK(BM_DefaultScenario)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
