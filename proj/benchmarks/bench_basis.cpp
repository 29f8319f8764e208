#include <benchmark/benchmark.h>

#include "vamp/basis.hpp"
#include "vamp/rng.hpp"

using namespace vamp;

namespace {

Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    RngStream rng(seed);
    Eigen::MatrixXd pts(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) pts(i, j) = 4.0 * rng.normal();
    return pts;
}

void bm_rbf_batch(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto points = random_points(5000, 2, 3);
    Eigen::MatrixXd centers = random_points(m, 2, 5);
    centers = centers.cwiseMin(19.0).cwiseMax(-19.0);
    const BasisSpec basis =
        make_rbf((Eigen::MatrixX2d(2, 2) << -20.0, 20.0, -20.0, 20.0).finished(), centers, 2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_basis_batch(basis, points));
    }
    state.SetItemsProcessed(state.iterations() * points.rows());
}

void bm_kmeans(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto points = random_points(2000, 2, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans_centers(points, m, 1));
    }
}

} // namespace

BENCHMARK(bm_rbf_batch)->Arg(37)->Arg(100)->Arg(250);
BENCHMARK(bm_kmeans)->Arg(37)->Arg(100);
