#include "vamp/reference_systems.hpp"

#include "vamp/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace vamp;
using Catch::Matchers::WithinAbs;

TEST_CASE("eta map pins the documented values at the origin") {
    const auto eta = eta_map(0.0, 0.0, 0.0);
    REQUIRE_THAT(eta[0], WithinAbs(0.5 * std::cos(-1.0), 1e-15));
    REQUIRE_THAT(eta[1], WithinAbs(0.5 * std::sin(-1.0), 1e-15));
    REQUIRE_THAT(eta[2], WithinAbs(0.5 * std::cos(-1.0), 1e-15));
    REQUIRE_THAT(eta[3], WithinAbs(0.5 * std::sin(-1.0), 1e-15));
    REQUIRE_THAT(eta[4], WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(eta[5], WithinAbs(1.0, 1e-15));
}

TEST_CASE("lorenz simulation shape and determinism") {
    const auto data = simulate_lorenz(3, 0.5, 42);
    REQUIRE(data.size() == 3);
    REQUIRE(data.dim() == 3);
    REQUIRE(data.dt == 0.005);
    REQUIRE(data.trajectories[0].rows() == 100);

    SECTION("bit-identical for the same seed, different otherwise") {
        const auto again = simulate_lorenz(3, 0.5, 42);
        for (std::size_t s = 0; s < 3; ++s) {
            REQUIRE((data.trajectories[s].array() == again.trajectories[s].array()).all());
        }
        const auto other = simulate_lorenz(3, 0.5, 43);
        REQUIRE((data.trajectories[0].array() != other.trajectories[0].array()).any());
    }
    SECTION("the reference lag of 0.75 time units is 150 steps") {
        REQUIRE(static_cast<Eigen::Index>(std::llround(0.75 / data.dt)) == 150);
    }
    SECTION("trajectories stay in a physically plausible range") {
        for (const auto& traj : data.trajectories) {
            REQUIRE(traj.allFinite());
            REQUIRE(traj.cwiseAbs().maxCoeff() < 200.0);
        }
    }
}

TEST_CASE("lorenz divergence guard") {
    // Absurd noise blows the multiplicative terms up within the burn-in.
    REQUIRE_THROWS_AS(simulate_lorenz(1, 0.25, 7, /*noise=*/200.0), numerical_error);
}

TEST_CASE("lorenz length validation") {
    REQUIRE_THROWS_AS(simulate_lorenz(1, 0.5034, 7), data_error);
    REQUIRE_THROWS_AS(simulate_lorenz(0, 0.5, 7), data_error);
}

TEST_CASE("eta transform maps trajectories row-wise") {
    const auto data = simulate_lorenz(2, 0.1, 11);
    const auto mapped = eta_transform(data);
    REQUIRE(mapped.dim() == 6);
    REQUIRE(mapped.trajectories[0].rows() == data.trajectories[0].rows());
    const auto row = data.trajectories[1].row(3);
    const auto expect = eta_map(row[0], row[1], row[2]);
    REQUIRE((mapped.trajectories[1].row(3).transpose() - expect).cwiseAbs().maxCoeff() == 0.0);

    SECTION("eta observables are bounded") {
        for (const auto& traj : mapped.trajectories) {
            REQUIRE(traj.cwiseAbs().maxCoeff() <= 1.5);
        }
    }
}

TEST_CASE("double gyre simulation validates the time grid") {
    // Building the full truth is exercised in the acceptance suite; here
    // only the argument contract.
    TruthModel stub;
    stub.bin_basis =
        make_indicator_grid((Eigen::MatrixX2d(2, 2) << 0.0, 2.0, 0.0, 1.0).finished(), {2, 2});
    stub.bin_centers = indicator_bin_centers(stub.bin_basis);
    stub.stationary = Eigen::VectorXd::Constant(4, 0.25);
    stub.step_matrix = Eigen::MatrixXd::Constant(4, 4, 0.25);
    stub.lag_matrix = stub.step_matrix;
    stub.dt = 0.02;
    REQUIRE_THROWS_AS(simulate_double_gyre(stub, 2, 0.0305, 3), data_error);
    const auto data = simulate_double_gyre(stub, 2, 0.1, 3);
    REQUIRE(data.trajectories[0].rows() == 5);
    REQUIRE(data.dim() == 2);
}

TEST_CASE("truth helpers reject out-of-range ranks") {
    TruthModel stub;
    stub.sigma = Eigen::VectorXd::Constant(4, 0.5);
    stub.sum_sigma_sq = 1.0;
    REQUIRE_THROWS_AS(stub.relative_hs_error(5), data_error);
    REQUIRE_THAT(stub.relative_hs_error(0), WithinAbs(1.0, 1e-15));
}
