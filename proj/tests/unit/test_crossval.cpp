#include "vamp/crossval.hpp"

#include "vamp/errors.hpp"
#include "support/chains.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace vamp;
using Catch::Matchers::WithinAbs;

namespace {

HyperParamPoint indicator_point(Eigen::Index m, Eigen::Index lag = 1) {
    HyperParamPoint theta;
    theta.basis_kind = BasisKind::IndicatorGrid;
    theta.m = m;
    theta.lag_steps = lag;
    return theta;
}

} // namespace

TEST_CASE("cross-validation report structure") {
    const auto chain = testsupport::three_state_chain();
    const auto data = testsupport::simulate_chain(chain, 8, 120, 51);
    const auto folds = split_folds(data, 4, 120, 7);

    std::vector<HyperParamPoint> grid{indicator_point(2), indicator_point(3), indicator_point(5)};
    CvOptions options;
    options.seed = 3;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport report = cross_validate(data, grid, folds, options);

    REQUIRE(report.cells.size() == 3);
    REQUIRE(report.mcv.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
        REQUIRE(report.cells[t].size() == 4);
        double total = 0.0;
        for (const auto& cell : report.cells[t]) {
            REQUIRE(cell.ok);
            total += cell.test_score;
        }
        REQUIRE_THAT(report.mcv[t], WithinAbs(total / 4.0, 1e-12));
    }
    REQUIRE(report.mcv[report.selected] ==
            *std::max_element(report.mcv.begin(), report.mcv.end()));

    SECTION("csv layout") {
        const std::string csv = report.to_csv();
        REQUIRE(csv.rfind("theta_id,basis,m,w,k,fold,train_score,test_score\n", 0) == 0);
        REQUIRE(csv.find("theta_id,mcv,selected") != std::string::npos);
        // 3 thetas x 4 folds + two headers + 3 summary rows
        REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 12 + 2 + 3);
    }
    SECTION("deterministic given the same inputs") {
        const CvReport again = cross_validate(data, grid, folds, options);
        REQUIRE(again.to_csv() == report.to_csv());
    }
    SECTION("threads do not change the report") {
        CvOptions parallel = options;
        parallel.threads = 4;
        REQUIRE(cross_validate(data, grid, folds, parallel).to_csv() == report.to_csv());
    }
}

TEST_CASE("training scores use only training-fitted quantities") {
    // Swapping the contents of two blocks inside the same fold changes no
    // training quantity and, because covariances are sums over pairs, no
    // test score either.
    const auto chain = testsupport::two_state_chain();
    auto data = testsupport::simulate_chain(chain, 4, 90, 33);

    FoldAssignment folds;
    folds.folds = 2;
    folds.block_length = 90;
    folds.blocks = {{0, 0, 90}, {1, 0, 90}, {2, 0, 90}, {3, 0, 90}};
    folds.fold_of_block = {0, 0, 1, 1};

    std::vector<HyperParamPoint> grid{indicator_point(2)};
    CvOptions options;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport before = cross_validate(data, grid, folds, options);

    std::swap(data.trajectories[0], data.trajectories[1]); // both in fold 0
    const CvReport after = cross_validate(data, grid, folds, options);

    for (int j = 0; j < 2; ++j) {
        REQUIRE(before.cells[0][static_cast<std::size_t>(j)].train_score ==
                after.cells[0][static_cast<std::size_t>(j)].train_score);
        REQUIRE(before.cells[0][static_cast<std::size_t>(j)].test_score ==
                after.cells[0][static_cast<std::size_t>(j)].test_score);
    }
}

TEST_CASE("vamp-e train score equals the training vamp-2 score per cell") {
    const auto chain = testsupport::three_state_chain();
    const auto data = testsupport::simulate_chain(chain, 6, 150, 13);
    const auto folds = split_folds(data, 3, 150, 5);
    std::vector<HyperParamPoint> grid{indicator_point(3)};
    CvOptions options;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport report = cross_validate(data, grid, folds, options);

    for (int j = 0; j < 3; ++j) {
        const auto train = fold_complement(data, folds, j);
        const auto basis = build_basis(grid[0], train, 0, 0.0, options.domain_bounds);
        const auto moments = accumulate_moments(train, basis, basis, 1);
        auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(moments));
        const auto cov = whitened_covariances(moments, record);
        const auto model =
            feature_tcca(cov, std::min(cov.c00.rows(), cov.c11.rows()), basis, basis);
        REQUIRE_THAT(report.cells[0][static_cast<std::size_t>(j)].train_score,
                     WithinAbs(vamp_r(model, cov, 2), 1e-8));
    }
}

TEST_CASE("failed cells score minus infinity and selection continues") {
    const auto chain = testsupport::two_state_chain();
    const auto data = testsupport::simulate_chain(chain, 4, 40, 3);
    const auto folds = split_folds(data, 4, 40, 1);
    // m = 64 cannot be whitened from ~90 training pairs of one-hot data
    // (rank collapses far below m, but the pair budget check fires first).
    std::vector<HyperParamPoint> grid{indicator_point(2), indicator_point(600)};
    CvOptions options;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport report = cross_validate(data, grid, folds, options);
    REQUIRE(report.selected == 0);
    REQUIRE(std::isinf(report.mcv[1]));
    REQUIRE(!report.cells[1][0].ok);
    REQUIRE(!report.cells[1][0].message.empty());

    SECTION("everything failing is an error") {
        std::vector<HyperParamPoint> bad{indicator_point(600)};
        REQUIRE_THROWS_AS(cross_validate(data, bad, folds, options), numerical_error);
    }
}

TEST_CASE("tie breaking prefers the earlier equal point") {
    const auto chain = testsupport::two_state_chain();
    const auto data = testsupport::simulate_chain(chain, 4, 80, 29);
    const auto folds = split_folds(data, 2, 80, 11);
    std::vector<HyperParamPoint> grid{indicator_point(2), indicator_point(2)};
    CvOptions options;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport report = cross_validate(data, grid, folds, options);
    REQUIRE(report.mcv[0] == report.mcv[1]);
    REQUIRE(report.selected == 0);
}

TEST_CASE("cross-validation with per-fold w optimization runs") {
    const auto chain = testsupport::two_state_chain();
    const auto data = testsupport::simulate_chain(chain, 6, 100, 71);
    const auto folds = split_folds(data, 3, 100, 2);

    HyperParamPoint rbf;
    rbf.basis_kind = BasisKind::NormalizedRbf;
    rbf.m = 3;
    rbf.lag_steps = 1;
    std::vector<HyperParamPoint> grid{rbf};
    CvOptions options;
    options.domain_bounds = (Eigen::MatrixX2d(1, 2) << 0.0, 1.0).finished();
    const CvReport report = cross_validate(data, grid, folds, options);
    for (const auto& cell : report.cells[0]) {
        REQUIRE(cell.ok);
        REQUIRE(cell.w_used > 0.0);
        REQUIRE(std::isfinite(cell.test_score));
    }
}

TEST_CASE("grid validation") {
    const auto chain = testsupport::two_state_chain();
    const auto data = testsupport::simulate_chain(chain, 4, 40, 3);
    const auto folds = split_folds(data, 2, 40, 1);
    REQUIRE_THROWS_AS(cross_validate(data, {}, folds), data_error);
}
