#include <benchmark/benchmark.h>

#include "vamp/linalg.hpp"
#include "vamp/rng.hpp"
#include "vamp/tcca.hpp"
#include "vamp/whitening.hpp"

using namespace vamp;

namespace {

/// Random well-conditioned whitened-style covariance triple of size n.
CovarianceTriple random_triple(Eigen::Index n, std::uint64_t seed) {
    RngStream rng(seed);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
    CovarianceTriple cov;
    cov.c00 = Eigen::MatrixXd::Identity(n, n);
    cov.c11 = Eigen::MatrixXd::Identity(n, n);
    cov.c01 = 0.9 * g / (g.norm() / std::sqrt(static_cast<double>(n)));
    cov.c01 /= std::max(1.0, linalg::thin_svd(cov.c01).s[0] / 0.98);
    cov.pair_count = 1;
    cov.lag_steps = 1;
    return cov;
}

void bm_feature_tcca(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto cov = random_triple(n, 17);
    const BasisSpec basis =
        make_indicator_grid((Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished(), {n});
    for (auto _ : state) {
        benchmark::DoNotOptimize(feature_tcca(cov, std::min<Eigen::Index>(n, 10), basis, basis));
    }
}

void bm_whitened_covariances(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    RngStream rng(3);
    Eigen::MatrixXd feats(4000, n);
    for (Eigen::Index i = 0; i < feats.rows(); ++i)
        for (Eigen::Index j = 0; j < n; ++j) feats(i, j) = rng.normal();
    BasisMoments m;
    m.sum0 = feats.colwise().sum().transpose();
    m.sum1 = m.sum0;
    m.s00 = feats.transpose() * feats;
    m.s01 = m.s00;
    m.s11 = m.s00;
    m.pair_count = feats.rows();
    m.lag_steps = 1;
    const auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(m));
    for (auto _ : state) {
        benchmark::DoNotOptimize(whitened_covariances(m, record));
    }
}

} // namespace

BENCHMARK(bm_feature_tcca)->Arg(34)->Arg(131)->Arg(251);
BENCHMARK(bm_whitened_covariances)->Arg(33)->Arg(130)->Arg(250);
