#include "vamp/crossval.hpp"

#include "vamp/csv.hpp"
#include "vamp/errors.hpp"
#include "vamp/threading.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace vamp {

namespace {

Eigen::MatrixX2d data_bounding_box(const TrajectoryCollection& data) {
    Eigen::MatrixX2d bounds(data.dim(), 2);
    bounds.col(0).setConstant(std::numeric_limits<double>::infinity());
    bounds.col(1).setConstant(-std::numeric_limits<double>::infinity());
    for (const auto& traj : data.trajectories) {
        bounds.col(0) = bounds.col(0).cwiseMin(traj.colwise().minCoeff().transpose());
        bounds.col(1) = bounds.col(1).cwiseMax(traj.colwise().maxCoeff().transpose());
    }
    for (Eigen::Index d = 0; d < bounds.rows(); ++d) {
        if (!(bounds(d, 0) < bounds(d, 1))) {
            // Degenerate extent; widen so lo < hi holds.
            bounds(d, 0) -= 0.5;
            bounds(d, 1) += 0.5;
        }
    }
    return bounds;
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t theta, int fold) {
    return base ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(theta) * 8191ULL +
                                            static_cast<std::uint64_t>(fold) + 1ULL));
}

} // namespace

std::string HyperParamPoint::basis_name() const {
    return basis_kind == BasisKind::IndicatorGrid ? "indicator" : "rbf";
}

BasisSpec build_basis(const HyperParamPoint& theta, const TrajectoryCollection& train_data,
                      std::uint64_t seed, double w,
                      const std::optional<Eigen::MatrixX2d>& bounds) {
    const Eigen::MatrixX2d box = bounds ? *bounds : data_bounding_box(train_data);
    if (theta.basis_kind == BasisKind::IndicatorGrid) {
        if (box.rows() != 1) {
            throw data_error("indicator grids from a plain size are 1-D only; "
                             "use an rbf basis for multivariate data");
        }
        return make_indicator_grid(box, {theta.m});
    }

    CenterPlacement placement = theta.centers;
    if (placement == CenterPlacement::Auto) {
        placement = box.rows() == 1 ? CenterPlacement::Uniform : CenterPlacement::KMeans;
    }
    if (placement == CenterPlacement::Uniform) {
        if (box.rows() != 1) throw data_error("uniform center placement is 1-D only");
        return make_uniform_rbf_1d(box(0, 0), box(0, 1), theta.m, w);
    }
    Eigen::MatrixXd centers = kmeans_centers(train_data, theta.m, seed);
    // Clamp k-means output onto the box; means of in-box points stay inside,
    // so this only rounds off floating-point grazes.
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        for (Eigen::Index d = 0; d < centers.cols(); ++d) {
            centers(i, d) = std::clamp(centers(i, d), box(d, 0), box(d, 1));
        }
    }
    return make_rbf(box, centers, w);
}

CvReport cross_validate(const TrajectoryCollection& data,
                        const std::vector<HyperParamPoint>& grid, const FoldAssignment& folds,
                        const CvOptions& options) {
    if (grid.empty()) throw data_error("empty hyper-parameter grid");
    if (folds.folds < 2) throw data_error("need at least 2 folds");

    CvReport report;
    report.grid = grid;
    report.score = options.score;
    report.folds = folds.folds;
    report.cells.assign(grid.size(), std::vector<CvReport::Cell>(
                                         static_cast<std::size_t>(folds.folds)));

    const std::size_t task_count = grid.size() * static_cast<std::size_t>(folds.folds);
    parallel_for(task_count, options.threads, [&](std::size_t task) {
        const std::size_t t = task / static_cast<std::size_t>(folds.folds);
        const int j = static_cast<int>(task % static_cast<std::size_t>(folds.folds));
        const HyperParamPoint& theta = grid[t];
        CvReport::Cell& cell = report.cells[t][static_cast<std::size_t>(j)];
        try {
            const TrajectoryCollection train = fold_complement(data, folds, j);
            const TrajectoryCollection test = fold_subset(data, folds, j);
            const std::uint64_t seed = cell_seed(options.seed, t, j);

            BasisSpec basis;
            if (theta.basis_kind == BasisKind::NormalizedRbf && !theta.fixed_w) {
                BasisSpec tmpl = build_basis(theta, train, seed, /*w=*/1.0, options.domain_bounds);
                const WOptimum opt =
                    optimize_w(train, tmpl, theta.lag_steps, options.golden, options.eps0);
                tmpl.w = opt.w;
                basis = std::move(tmpl);
            } else {
                basis = build_basis(theta, train, seed, theta.fixed_w.value_or(0.0),
                                    options.domain_bounds);
            }

            const auto train_pairs = lagged_pair_count(train, theta.lag_steps);
            if (train_pairs <= basis.size()) {
                throw data_error("fold too small for theta: " + std::to_string(train_pairs) +
                                 " training pairs for " + std::to_string(basis.size()) +
                                 " features");
            }
            const BasisMoments train_moments =
                accumulate_moments(train, basis, basis, theta.lag_steps);
            auto record = std::make_shared<DecorrelationRecord>(
                decorrelate_moments(train_moments, options.eps0));
            const CovarianceTriple cov_train = whitened_covariances(train_moments, record);
            const Eigen::Index full = std::min(cov_train.c00.rows(), cov_train.c11.rows());
            const Eigen::Index k = theta.k.value_or(full);
            const KoopmanModel model = feature_tcca(cov_train, k, basis, basis, options.eps0);

            const BasisMoments test_moments =
                accumulate_moments(test, basis, basis, theta.lag_steps);
            const CovarianceTriple cov_test = whitened_covariances(test_moments, record);

            cell.train_score = evaluate_score(options.score, model, cov_train);
            cell.test_score = evaluate_score(options.score, model, cov_test);
            cell.w_used = basis.kind == BasisKind::NormalizedRbf ? basis.w : 0.0;
            cell.k_used = model.rank();
            cell.ok = true;
        } catch (const error& e) {
            cell.ok = false;
            cell.message = e.what();
            cell.train_score = -std::numeric_limits<double>::infinity();
            cell.test_score = -std::numeric_limits<double>::infinity();
        }
    });

    report.mcv.resize(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
        double total = 0.0;
        for (const auto& cell : report.cells[t]) total += cell.test_score;
        report.mcv[t] = total / static_cast<double>(folds.folds);
    }

    // Maximal MCV; ties break toward smaller m, then smaller k.
    const auto k_order = [](const HyperParamPoint& p) {
        return p.k ? *p.k : std::numeric_limits<Eigen::Index>::max();
    };
    std::size_t best = 0;
    for (std::size_t t = 1; t < grid.size(); ++t) {
        const double lhs = report.mcv[t];
        const double rhs = report.mcv[best];
        if (lhs > rhs ||
            (lhs == rhs && (grid[t].m < grid[best].m ||
                            (grid[t].m == grid[best].m && k_order(grid[t]) < k_order(grid[best]))))) {
            best = t;
        }
    }
    if (std::isinf(report.mcv[best])) {
        throw numerical_error("every hyper-parameter point failed cross-validation");
    }
    report.selected = best;
    return report;
}

std::string CvReport::to_csv() const {
    std::ostringstream out;
    out << "theta_id,basis,m,w,k,fold,train_score,test_score\n";
    for (std::size_t t = 0; t < grid.size(); ++t) {
        for (std::size_t j = 0; j < cells[t].size(); ++j) {
            const Cell& cell = cells[t][j];
            out << t << ',' << grid[t].basis_name() << ',' << grid[t].m << ','
                << csv::format_double(cell.w_used) << ',' << cell.k_used << ',' << j << ','
                << csv::format_double(cell.train_score) << ','
                << csv::format_double(cell.test_score) << '\n';
        }
    }
    out << "theta_id,mcv,selected\n";
    for (std::size_t t = 0; t < grid.size(); ++t) {
        out << t << ',' << csv::format_double(mcv[t]) << ',' << (t == selected ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace vamp
