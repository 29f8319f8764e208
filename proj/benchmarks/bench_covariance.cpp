#include <benchmark/benchmark.h>

#include "vamp/covariance.hpp"
#include "vamp/rng.hpp"

using namespace vamp;

namespace {

TrajectoryCollection synthetic_data(int n_traj, Eigen::Index length, std::uint64_t seed) {
    TrajectoryCollection data;
    data.dt = 1.0;
    for (int s = 0; s < n_traj; ++s) {
        RngStream rng(seed, s + 1);
        Eigen::MatrixXd traj(length, 1);
        double x = 0.0;
        for (Eigen::Index t = 0; t < length; ++t) {
            x = 0.95 * x + rng.normal();
            traj(t, 0) = x;
        }
        data.trajectories.push_back(std::move(traj));
    }
    return data;
}

void bm_accumulate_moments_rbf(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto data = synthetic_data(10, 500, 7);
    const BasisSpec basis = make_uniform_rbf_1d(-8.0, 8.0, m, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(accumulate_moments(data, basis, basis, 1));
    }
    state.SetItemsProcessed(state.iterations() * lagged_pair_count(data, 1));
}

void bm_accumulate_moments_indicator(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto data = synthetic_data(10, 500, 7);
    const BasisSpec basis =
        make_indicator_grid((Eigen::MatrixX2d(1, 2) << -8.0, 8.0).finished(), {m});
    for (auto _ : state) {
        benchmark::DoNotOptimize(accumulate_moments(data, basis, basis, 1));
    }
    state.SetItemsProcessed(state.iterations() * lagged_pair_count(data, 1));
}

} // namespace

BENCHMARK(bm_accumulate_moments_rbf)->Arg(33)->Arg(100)->Arg(250);
BENCHMARK(bm_accumulate_moments_indicator)->Arg(33)->Arg(250);

BENCHMARK_MAIN();
