#include "lineid/estimators.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace lineid;

namespace {

std::vector<RegressorSample> samples(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<RegressorSample> out(n);
    for (auto& s : out) {
        s.u = {g(rng), g(rng)};
        s.y = 0.2 * s.u.x + 0.4 * s.u.y + 0.01 * g(rng);
    }
    return out;
}

template <class Update>
void run_updates(benchmark::State& state, EstimatorState s0, Update update) {
    const auto xs = samples(4096);
    std::size_t i = 0;
    EstimatorState s = s0;
    for (auto _ : state) {
        s = update(s, xs[i++ & 4095]);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

static void BM_Rls(benchmark::State& st) {
    run_updates(st, make_rls_state({}, 1e-3), [](const EstimatorState& s, const RegressorSample& x) {
        return rls_update(s, x);
    });
}
BENCHMARK(BM_Rls);

static void BM_CfRls(benchmark::State& st) {
    run_updates(st, make_rls_state({}, 1e-3), [](const EstimatorState& s, const RegressorSample& x) {
        return cf_rls_update(s, x, {0.99995});
    });
}
BENCHMARK(BM_CfRls);

static void BM_Kalman(benchmark::State& st) {
    const KalmanParams kp;
    run_updates(st, make_kalman_state({}, 1e-3), [&](const EstimatorState& s, const RegressorSample& x) {
        return kalman_update(s, x, kp);
    });
}
BENCHMARK(BM_Kalman);

static void BM_VdfRls(benchmark::State& st) {
    run_updates(st, make_rls_state({}, 1e-3), [](const EstimatorState& s, const RegressorSample& x) {
        return vdf_rls_update(s, x, {0.995, 0.2});
    });
}
BENCHMARK(BM_VdfRls);
