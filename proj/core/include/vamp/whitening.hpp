#pragma once

#include "vamp/covariance.hpp"

#include <Eigen/Core>
#include <memory>

namespace vamp {

/// PCA-based de-correlation of a basis pair. The transformed features are
///
///   chi_new(x) = [ proj (chi(x) - mean) ; 1 ]
///
/// with proj = diag(|lambda|^{-1/2}) Q^T built from the eigenpairs of the
/// mean-centered feature covariance whose |eigenvalue| exceeds eps0. On the
/// data that produced the record, the whitened block has zero mean and unit
/// second moment, and the appended constant is exact. This guarantees
/// full-rank covariances, singular values <= 1, and the exact first
/// singular triple (1, 1, 1) for the downstream decomposition.
struct DecorrelationRecord {
    Eigen::VectorXd mean0;
    Eigen::VectorXd mean1;
    Eigen::MatrixXd proj0; // kept0 x n
    Eigen::MatrixXd proj1; // kept1 x m
    double eps0 = kDefaultEps0;

    static constexpr double kDefaultEps0 = 1e-10;

    Eigen::Index kept0() const { return proj0.rows(); }
    Eigen::Index kept1() const { return proj1.rows(); }
    /// Whitened dimensions including the appended constant.
    Eigen::Index dim0() const { return kept0() + 1; }
    Eigen::Index dim1() const { return kept1() + 1; }
};

/// Build the de-correlation transform from raw feature moments.
/// Eigenvalues with magnitude <= eps0 are dropped; negative round-off
/// eigenvalues enter through their absolute value. Throws numerical_error
/// when nothing survives the threshold on either side (degenerate data with
/// an all-constant feature block is fine: the constant is re-appended).
DecorrelationRecord decorrelate_moments(const BasisMoments& moments,
                                        double eps0 = DecorrelationRecord::kDefaultEps0);

/// Convenience wrapper: one pass over the data, then decorrelate_moments.
/// Requires pair_count > max(n, m) so second moments are estimable.
DecorrelationRecord decorrelate(const TrajectoryCollection& data, const BasisSpec& basis0,
                                const BasisSpec& basis1, Eigen::Index tau_steps,
                                double eps0 = DecorrelationRecord::kDefaultEps0);

/// Apply the chi0-side transform to one feature vector: whitened block plus
/// a trailing exact 1.
Eigen::VectorXd apply_decorrelation0(const DecorrelationRecord& rec, const Eigen::VectorXd& features);
Eigen::VectorXd apply_decorrelation1(const DecorrelationRecord& rec, const Eigen::VectorXd& features);

/// Row-wise transform of a feature matrix (rows are samples).
Eigen::MatrixXd apply_decorrelation0(const DecorrelationRecord& rec, const Eigen::MatrixXd& features);
Eigen::MatrixXd apply_decorrelation1(const DecorrelationRecord& rec, const Eigen::MatrixXd& features);

/// Covariance triple of the whitened features, computed in closed form from
/// raw moments (exactly the averages the transformed features would give).
/// The moments need not be the ones the record was built from, which is how
/// test-set covariances are expressed in a training-fitted basis.
CovarianceTriple whitened_covariances(const BasisMoments& moments,
                                      std::shared_ptr<const DecorrelationRecord> record);

} // namespace vamp
