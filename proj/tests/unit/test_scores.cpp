#include "vamp/scores.hpp"

#include "vamp/errors.hpp"
#include "vamp/rng.hpp"
#include "support/chains.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace vamp;
using Catch::Matchers::WithinAbs;

namespace {

struct Fitted {
    BasisMoments moments;
    CovarianceTriple cov;
    KoopmanModel model;
};

Fitted fit_chain(const testsupport::Chain& chain, int n_traj, Eigen::Index len, std::uint64_t seed,
                 Eigen::Index k = 0) {
    Fitted f;
    const auto data = testsupport::simulate_chain(chain, n_traj, len, seed);
    f.moments = accumulate_moments(data, chain.basis, chain.basis, 1);
    auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(f.moments));
    f.cov = whitened_covariances(f.moments, record);
    const Eigen::Index full = std::min(f.cov.c00.rows(), f.cov.c11.rows());
    f.model = feature_tcca(f.cov, k == 0 ? full : k, chain.basis, chain.basis);
    return f;
}

} // namespace

TEST_CASE("vamp-r on training covariances is the singular value power sum") {
    const auto chain = testsupport::three_state_chain();
    const auto f = fit_chain(chain, 4, 300, 5);
    for (const int r : {1, 2, 3}) {
        double expect = 0.0;
        for (Eigen::Index i = 0; i < f.model.rank(); ++i) {
            expect += std::pow(f.model.singular_values[i], r);
        }
        REQUIRE_THAT(vamp_r(f.model, f.cov, r), WithinAbs(expect, 1e-10));
    }
}

TEST_CASE("two-state exact scores") {
    const auto chain = testsupport::two_state_chain();
    const auto cov = testsupport::exact_triple(chain);
    const auto model = feature_tcca(cov, 2, chain.basis, chain.basis);

    // singular values (1, 0.7)
    REQUIRE_THAT(vamp_r(model, cov, 2), WithinAbs(1.49, 1e-12));
    REQUIRE_THAT(vamp_r_matrix(cov, 1), WithinAbs(1.7, 1e-12));
    REQUIRE_THAT(vamp_r_matrix(cov, 2), WithinAbs(vamp_r(model, cov, 2), 1e-10));
}

TEST_CASE("rank-one post-whitening scores one for every r") {
    const auto chain = testsupport::two_state_chain();
    const auto f = fit_chain(chain, 3, 200, 8, /*k=*/1);
    for (const int r : {1, 2, 5}) {
        REQUIRE_THAT(vamp_r(f.model, f.cov, r), WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("matrix score on identity covariances counts dimensions") {
    CovarianceTriple cov;
    cov.c00 = Eigen::MatrixXd::Identity(3, 3);
    cov.c01 = Eigen::MatrixXd::Identity(3, 3);
    cov.c11 = Eigen::MatrixXd::Identity(3, 3);
    REQUIRE_THAT(vamp_r_matrix(cov, 2), WithinAbs(3.0, 1e-12));
}

TEST_CASE("vamp-e") {
    const auto chain = testsupport::three_state_chain();
    const auto f = fit_chain(chain, 4, 300, 19);

    SECTION("equals vamp-2 on training covariances") {
        REQUIRE_THAT(vamp_e(f.model, f.cov), WithinAbs(vamp_r(f.model, f.cov, 2), 1e-8));
    }
    SECTION("zero model scores zero") {
        auto zero = f.model;
        zero.singular_values.setZero();
        REQUIRE_THAT(vamp_e(zero, f.cov), WithinAbs(0.0, 1e-14));
    }
    SECTION("stays finite on rank-deficient test covariances") {
        // A test set that visits a single state: one-hot features repeat,
        // every covariance block is rank one.
        const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(40, 1, 0.2);
        TrajectoryCollection degenerate;
        degenerate.dt = 1.0;
        degenerate.trajectories.push_back(constant);
        const auto test_moments = accumulate_moments(degenerate, chain.basis, chain.basis, 1);
        const auto cov_test = whitened_covariances(test_moments, f.model.decorrelation);
        const double value = vamp_e(f.model, cov_test);
        REQUIRE(std::isfinite(value));
    }
}

TEST_CASE("subspace score") {
    const auto chain = testsupport::three_state_chain();
    const auto f = fit_chain(chain, 4, 400, 23, /*k=*/2);

    SECTION("test = train reduces to the power sum") {
        for (const int r : {1, 2}) {
            double expect = 0.0;
            for (Eigen::Index i = 0; i < 2; ++i) {
                expect += std::pow(f.model.singular_values[i], r);
            }
            REQUIRE_THAT(subspace_vamp_r(f.model, f.cov, r), WithinAbs(expect, 1e-8));
        }
    }
    SECTION("invariant under invertible column transforms") {
        const auto test_data = testsupport::simulate_chain(chain, 2, 300, 24);
        const auto cov_test = whitened_covariances(
            accumulate_moments(test_data, chain.basis, chain.basis, 1), f.model.decorrelation);
        const double base = subspace_vamp_r(f.model, cov_test, 2);

        RngStream rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXd af(2, 2);
            Eigen::MatrixXd ag(2, 2);
            do {
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        af(i, j) = rng.normal();
                        ag(i, j) = rng.normal();
                    }
            } while (std::abs(af.determinant()) < 0.1 || std::abs(ag.determinant()) < 0.1);
            auto transformed = f.model;
            transformed.u = f.model.u * af;
            transformed.v = f.model.v * ag;
            REQUIRE_THAT(subspace_vamp_r(transformed, cov_test, 2), WithinAbs(base, 1e-8));
        }
    }
    SECTION("at full rank the score ignores the fitted model") {
        const auto full = fit_chain(chain, 4, 400, 23);
        const auto test_data = testsupport::simulate_chain(chain, 2, 300, 77);
        const auto cov_test = whitened_covariances(
            accumulate_moments(test_data, chain.basis, chain.basis, 1), full.model.decorrelation);
        const double score = subspace_vamp_r(full.model, cov_test, 2);
        const double direct = vamp_r_matrix(cov_test, 2);
        REQUIRE_THAT(score, WithinAbs(direct, 1e-8));
    }
    SECTION("singular projected covariance is reported distinctly") {
        const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(40, 1, 0.2);
        TrajectoryCollection degenerate;
        degenerate.dt = 1.0;
        degenerate.trajectories.push_back(constant);
        const auto cov_test = whitened_covariances(
            accumulate_moments(degenerate, chain.basis, chain.basis, 1), f.model.decorrelation);
        REQUIRE_THROWS_AS(subspace_vamp_r(f.model, cov_test, 2), singular_test_covariance);
    }
}

TEST_CASE("score ordering in the rank") {
    const auto chain = testsupport::three_state_chain();
    const auto data = testsupport::simulate_chain(chain, 4, 400, 41);
    const auto moments = accumulate_moments(data, chain.basis, chain.basis, 1);
    auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(moments));
    const auto cov = whitened_covariances(moments, record);
    double previous = 0.0;
    for (Eigen::Index k = 1; k <= 3; ++k) {
        const auto model = feature_tcca(cov, k, chain.basis, chain.basis);
        const double score = vamp_r(model, cov, 2);
        REQUIRE(score >= previous - 1e-12);
        previous = score;
    }
}

TEST_CASE("hs error against a hand-built oracle") {
    const auto chain = testsupport::two_state_chain();
    const auto truth = testsupport::truth_from_chain(chain);
    const auto exact = exact_indicator_moments(chain.stationary, chain.transition, 1);

    SECTION("full rank recovers the operator exactly") {
        const auto model = estimate_koopman_model(exact, chain.basis, chain.basis);
        const auto err = hs_error_vs_oracle(model, truth);
        REQUIRE(err.absolute < 1e-8);
    }
    SECTION("rank-one error matches the tail formula") {
        const auto model = estimate_koopman_model(exact, chain.basis, chain.basis, 1);
        const auto err = hs_error_vs_oracle(model, truth);
        // sqrt(sigma_2^2 / (1 + sigma_2^2)) with sigma_2 = 0.7
        REQUIRE_THAT(err.relative, WithinAbs(std::sqrt(0.49 / 1.49), 1e-10));
        REQUIRE_THAT(err.relative, WithinAbs(truth.relative_hs_error(1), 1e-10));
    }
    SECTION("state-space mismatch is rejected") {
        const auto other = testsupport::three_state_chain();
        const auto model = estimate_koopman_model(exact, chain.basis, chain.basis);
        REQUIRE_THROWS_AS(hs_error_vs_oracle(model, testsupport::truth_from_chain(other)),
                          data_error);
    }
    SECTION("data-estimated models pass the dual-route consistency check") {
        const auto f = fit_chain(chain, 4, 500, 3);
        const auto err = hs_error_vs_oracle(f.model, truth);
        REQUIRE(std::isfinite(err.relative));
        REQUIRE(err.relative >= 0.0);
    }
}

TEST_CASE("score spec parsing and naming") {
    REQUIRE(ScoreSpec::parse("vampe", 2).kind == ScoreKind::VampE);
    REQUIRE(ScoreSpec::parse("vampr", 3).r == 3);
    REQUIRE(ScoreSpec::parse("subspace-vampr", 1).kind == ScoreKind::SubspaceVampR);
    REQUIRE_THROWS_AS(ScoreSpec::parse("bogus", 2), data_error);
    REQUIRE_THROWS_AS(ScoreSpec::parse("vampr", 0), data_error);
    REQUIRE(ScoreSpec{ScoreKind::VampE, 2}.name() == "vamp-e");
}
