#pragma once

#include "vamp/trajectory.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace vamp {

enum class BasisKind { IndicatorGrid, NormalizedRbf };

/// A feature family chi: R^d -> R^m. Either an indicator partition of a
/// rectangular domain, or normalized Gaussian radial basis functions with a
/// smoothing parameter w. Immutable; evaluation is pure.
struct BasisSpec {
    BasisKind kind = BasisKind::IndicatorGrid;
    Eigen::MatrixX2d domain_bounds;     // per-dimension (lo, hi)
    std::vector<Eigen::Index> bins_per_dim; // indicator only
    Eigen::MatrixXd centers;            // rbf only, m x d
    double w = 0.0;                     // rbf only, >= 0

    Eigen::Index dim() const { return domain_bounds.rows(); }
    Eigen::Index size() const;

    void validate() const;
    bool operator==(const BasisSpec&) const = default;
};

/// Uniform indicator partition of the box `bounds`, bins_per_dim cells per
/// dimension; m is their product.
BasisSpec make_indicator_grid(const Eigen::MatrixX2d& bounds,
                              const std::vector<Eigen::Index>& bins_per_dim);

/// Normalized RBF basis with explicit centers.
BasisSpec make_rbf(const Eigen::MatrixX2d& bounds, const Eigen::MatrixXd& centers, double w);

/// Normalized RBF basis with m centers spread uniformly over a 1-D domain,
/// center i at lo + (i + 1/2) (hi - lo)/m.
BasisSpec make_uniform_rbf_1d(double lo, double hi, Eigen::Index m, double w);

/// Cell centers of an indicator grid, one row per bin, in flattening order
/// (last dimension fastest).
Eigen::MatrixXd indicator_bin_centers(const BasisSpec& spec);

/// Flat bin index of x under an indicator grid; out-of-domain coordinates
/// clamp to the nearest boundary bin.
Eigen::Index indicator_bin_index(const BasisSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Evaluate the feature vector at a single point. Indicator bases yield a
/// one-hot vector; RBF bases a probability vector (softmax-normalized, so
/// entries sum to 1 even for extreme w).
Eigen::VectorXd evaluate_basis(const BasisSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Evaluate the basis on every row of `points`, returning a rows x m matrix.
Eigen::MatrixXd evaluate_basis_batch(const BasisSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points);

/// Squared Euclidean distances from every row of `points` to every center,
/// the shared kernel of RBF evaluation (exposed so parameter sweeps over w
/// can reuse one distance computation).
Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                  const Eigen::Ref<const Eigen::MatrixXd>& centers);

/// Row-wise softmax of -w * sq_dist; the RBF feature matrix.
Eigen::MatrixXd rbf_features_from_distances(const Eigen::Ref<const Eigen::MatrixXd>& sq_dist,
                                            double w);

/// Lloyd's k-means over all sample points of `data`: seeded distinct-point
/// initialization, empty clusters reseeded to the point farthest from its
/// assigned center, at most 100 iterations, stop when assignments settle.
/// Deterministic given the seed.
Eigen::MatrixXd kmeans_centers(const TrajectoryCollection& data, Eigen::Index m,
                               std::uint64_t seed);
Eigen::MatrixXd kmeans_centers(const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::Index m,
                               std::uint64_t seed);

} // namespace vamp
