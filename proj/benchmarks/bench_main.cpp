#include <benchmark/benchmark.h>

#include "hellbayes/dp_mixture.hpp"
#include "hellbayes/estimators.hpp"
#include "hellbayes/experiments.hpp"
#include "hellbayes/hellinger.hpp"
#include "hellbayes/hierarchical.hpp"
#include "hellbayes/quadrature.hpp"

using namespace hellbayes;

namespace {

const GaussianMixtureDensity kMix({0.6, 0.3, 0.1}, {5.0, 4.2, 6.5}, {1.0, 0.4, 0.8});

void BM_Affinity(benchmark::State& state) {
    const auto grid = make_grid(-10, 20, static_cast<int>(state.range(0)));
    const auto root = RootDensity::from(kMix, grid);
    double mu = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(root.affinity(mu, 1.0));
        mu += 1e-4;
    }
    state.SetLabel(std::to_string(grid->size()) + " nodes");
}
BENCHMARK(BM_Affinity)->Arg(32)->Arg(128)->Arg(512);

void BM_ProfileLookup(benchmark::State& state) {
    const auto grid = make_grid(-10, 20, 32);
    const auto root = RootDensity::from(kMix, grid);
    const LocationAffinityProfile profile(root, 1.0);
    double mu = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(profile.affinity(mu));
        mu = mu > 6.0 ? 4.0 : mu + 1e-3;
    }
}
BENCHMARK(BM_ProfileLookup);

void BM_GibbsEnsemble(benchmark::State& state) {
    const auto data = simulate_dataset(static_cast<int>(state.range(0)), 5.0, 1.0, 1);
    const DpPriorConfig prior;
    McmcConfig mcmc;
    mcmc.iterations = 200;
    mcmc.burn_in = 0;
    mcmc.thin = 10;
    for (auto _ : state) benchmark::DoNotOptimize(run_blocked_gibbs_ensemble(data, prior, mcmc));
    state.SetItemsProcessed(state.iterations() * mcmc.iterations);
}
BENCHMARK(BM_GibbsEnsemble)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_MetropolisChain(benchmark::State& state) {
    const auto grid = make_grid(-10, 20, 32);
    const auto root = RootDensity::from(kMix, grid);
    const PriorSpec prior;
    const auto family = ParametricFamily::normal_location(1.0);
    MetropolisConfig config;
    config.steps = 20000;
    for (auto _ : state) benchmark::DoNotOptimize(metropolis_chain(root, 20.0, prior, family, config, {5.0}));
    state.SetItemsProcessed(state.iterations() * config.steps);
}
BENCHMARK(BM_MetropolisChain)->Unit(benchmark::kMillisecond);

void BM_ThetaTwo(benchmark::State& state) {
    const auto data = simulate_dataset(20, 5.0, 1.0, 3);
    McmcConfig mcmc;
    const auto ensemble = run_blocked_gibbs_ensemble(data, DpPriorConfig{}, mcmc);
    const auto grid = make_grid(-10, 20, 32);
    const auto family = ParametricFamily::normal_location(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(theta_hat_2(ensemble, family, grid, {{0.0, 10.0}}));
}
BENCHMARK(BM_ThetaTwo)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
