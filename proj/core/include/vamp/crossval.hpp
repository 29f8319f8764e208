#pragma once

#include "vamp/nonlinear_tcca.hpp"
#include "vamp/scores.hpp"
#include "vamp/tcca.hpp"
#include "vamp/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vamp {

enum class CenterPlacement {
    Auto,    // uniform 1-D grid for d == 1, k-means otherwise
    Uniform, // evenly spaced centers (1-D domains only)
    KMeans,
};

/// One hyper-parameter point theta: basis family and size, smoothing mode,
/// model rank, and lag.
struct HyperParamPoint {
    BasisKind basis_kind = BasisKind::NormalizedRbf;
    Eigen::Index m = 1;
    std::optional<double> fixed_w;   // nullopt + rbf -> optimize w per fold
    std::optional<Eigen::Index> k;   // nullopt -> full rank
    Eigen::Index lag_steps = 1;
    CenterPlacement centers = CenterPlacement::Auto;

    std::string basis_name() const;
};

/// Per-hyper-parameter, per-fold train/test scores plus the mean CV score
/// and the selected point.
struct CvReport {
    struct Cell {
        double train_score = 0.0;
        double test_score = 0.0;
        double w_used = 0.0;      // 0 for indicator bases
        Eigen::Index k_used = 0;
        bool ok = false;
        std::string message;      // failure note when !ok
    };

    std::vector<HyperParamPoint> grid;
    std::vector<std::vector<Cell>> cells; // [theta][fold]
    std::vector<double> mcv;              // [theta]
    std::size_t selected = 0;
    ScoreSpec score;
    int folds = 0;

    /// CSV rows `theta_id,basis,m,w,k,fold,train_score,test_score` followed
    /// by a summary block `theta_id,mcv,selected`.
    std::string to_csv() const;
};

struct CvOptions {
    ScoreSpec score{};                       // defaults to VAMP-E
    std::uint64_t seed = 0;                  // center placement per cell
    int threads = 1;
    GoldenSectionConfig golden{};            // w search settings
    double eps0 = DecorrelationRecord::kDefaultEps0;
    /// Basis domain; defaults to the training data's bounding box per fold.
    std::optional<Eigen::MatrixX2d> domain_bounds;
};

/// J-fold cross-validation over the grid. For every (theta, fold): fit on
/// the training blocks (optimizing w per fold when requested), then score
/// the trained model on the held-out fold's covariances expressed in the
/// training basis and training de-correlation transform. Failed cells are
/// scored -inf and the run continues. Cells are independent and may run
/// concurrently; the report does not depend on scheduling.
CvReport cross_validate(const TrajectoryCollection& data,
                        const std::vector<HyperParamPoint>& grid, const FoldAssignment& folds,
                        const CvOptions& options = {});

/// Basis construction shared by cross_validate and the CLI: indicator grids
/// and uniform 1-D RBF centers are data-independent; k-means centers come
/// from the (training) data with the given seed. Domain bounds are the
/// data's bounding box unless `bounds` is supplied.
BasisSpec build_basis(const HyperParamPoint& theta, const TrajectoryCollection& train_data,
                      std::uint64_t seed, double w,
                      const std::optional<Eigen::MatrixX2d>& bounds = std::nullopt);

} // namespace vamp
