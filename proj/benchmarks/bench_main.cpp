#include <vector>

#include <benchmark/benchmark.h>

#include "grnbounds/expect.hpp"
#include "grnbounds/pde.hpp"
#include "grnbounds/ssa.hpp"

using namespace grnbounds;

namespace {

GeneNetwork mixed() {
    return GeneNetwork(Matrix{{2.5, -0.2, -0.25}, {-0.03, 3.0, -0.3}, {-0.5, -0.1, 2.0}}, {0.5, 0.75, 1.0},
                       {0.2, 0.5, 0.6});
}

// A fixed number of steps on grids of growing size; heat flow only isolates the line solves.
void BM_CrankNicolsonSweep(benchmark::State& state) {
    const auto net = mixed();
    const GaussianFinalData fd({5, 0.5, 0.3}, {150, 70, 80});
    const TimeWindow w(6.0, 5.9);
    PdeGrid g{9.0, 12.0, static_cast<std::size_t>(state.range(0)), 0.01};
    for (auto _ : state) benchmark::DoNotOptimize(solve_final_value(net, fd, g, w, SolverOptions{false, 1}));
    state.SetItemsProcessed(state.iterations() * 10 * g.points_per_axis * g.points_per_axis * g.points_per_axis);
}
BENCHMARK(BM_CrankNicolsonSweep)->Arg(17)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_ReactionStep(benchmark::State& state) {
    const auto net = mixed();
    std::vector<double> eta(3 * state.range(0));
    for (std::size_t k = 0; k < eta.size(); ++k) eta[k] = 100.0 + static_cast<double>(k % 97);
    std::vector<double> out(eta.size());
    for (auto _ : state) {
        for (std::size_t k = 0; k < eta.size(); k += 3) rate_into(net, eta.data() + k, out.data() + k);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReactionStep)->Arg(4913)->Arg(35937)->Arg(274625);

void BM_SsaTrajectory(benchmark::State& state) {
    const SsaConfig cfg{GeneNetwork(Matrix{{0.1, -2, -2}, {0, 0.04, 0}, {0, 0, 0.6}}, {0.4, 0.1, 0.3}, {1, 1, 1}),
                        {76, 8, 9}, 4.0, 1, 11};
    std::uint64_t k = 0;
    std::size_t events = 0;
    for (auto _ : state) {
        const auto path = simulate_trajectory(cfg, k++);
        events += path.events();
        benchmark::DoNotOptimize(path);
    }
    state.counters["events"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaTrajectory);

void BM_Quadrature(benchmark::State& state) {
    const auto net = mixed();
    const GaussianFinalData fd({5, 0.5, 0.3}, {150, 70, 80});
    const TimeWindow w(6.0, 3.0);
    auto g = default_grid(9.0, 12.0, w);
    g.dt = 1.0;
    const auto field = solve_final_value(net, fd, g, w);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_weight_integral(field, 9.0));
}
BENCHMARK(BM_Quadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
