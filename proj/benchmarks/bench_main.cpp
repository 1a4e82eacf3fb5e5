#include <benchmark/benchmark.h>

#include "starkecho/cavity.hpp"
#include "starkecho/decay_fit.hpp"
#include "starkecho/efficiency.hpp"
#include "starkecho/pathways.hpp"
#include "starkecho/propagate.hpp"
#include "starkecho/scenario.hpp"

using namespace starkecho;

static void BM_enumerate_pathways(benchmark::State& state)
{
    ValidatedSequence seq = Scenario::bundled_forward().build_sequence();
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_pathways(seq, 27.5));
}
BENCHMARK(BM_enumerate_pathways);

static void BM_propagate(benchmark::State& state)
{
    Scenario sc = Scenario::bundled_forward();
    sc.simulation.ions = static_cast<std::size_t>(state.range(0));
    ValidatedSequence seq = sc.build_sequence();
    auto ions = sc.sample();
    PropagateOptions opt = sc.propagate_options();
    opt.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(propagate(seq, ions, sc.material, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_propagate)->Arg(1000)->Arg(4000);

static void BM_cavity_optimize(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(optimize_cavity(0.1, 0.999));
}
BENCHMARK(BM_cavity_optimize);

static void BM_decay_fit(benchmark::State& state)
{
    DecayCurve c;
    for (double b = 0.5; b <= 40.0; b += 2.0) {
        c.delay_us.push_back(b);
        c.intensity.push_back(decay_factor(0.0, 21.9, 11.0, 0.0, b));
        c.sigma.push_back(1e-3);
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_decay(c, DecayModel::eq_excited));
}
BENCHMARK(BM_decay_fit);

BENCHMARK_MAIN();
