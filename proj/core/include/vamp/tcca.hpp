#pragma once

#include "vamp/covariance.hpp"
#include "vamp/whitening.hpp"

#include <Eigen/Core>
#include <memory>

namespace vamp {

/// Estimated finite-rank linear Markov model: singular values s_1 >= ... >=
/// s_k and coefficient matrices mapping (whitened) basis functions to the
/// singular-function estimates f_i = u_i^T chi0 and g_i = v_i^T chi1.
/// Immutable after construction; safe to share across threads.
struct KoopmanModel {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd u; // n x k
    Eigen::MatrixXd v; // m x k
    BasisSpec basis0;
    BasisSpec basis1;
    std::shared_ptr<const DecorrelationRecord> decorrelation;
    Eigen::Index lag_steps = 0;

    Eigen::Index rank() const { return singular_values.size(); }

    /// Left/right singular-function estimates evaluated at sample points
    /// (rows); returns points x k.
    Eigen::MatrixXd evaluate_left(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
    Eigen::MatrixXd evaluate_right(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
};

/// Best rank-k linear model from a covariance triple: truncated SVD of
/// C00^{-1/2} C01 C11^{-1/2}, mapped back through the inverse square roots.
/// The triple must come from de-correlated bases so C00 and C11 are well
/// conditioned; pass the basis pair so the model can featurize new data.
KoopmanModel feature_tcca(const CovarianceTriple& cov, Eigen::Index k, const BasisSpec& basis0,
                          const BasisSpec& basis1,
                          double eig_floor = DecorrelationRecord::kDefaultEps0);

/// Full whitened matrix C00^{-1/2} C01 C11^{-1/2} of a triple.
Eigen::MatrixXd whitened_koopman_matrix(const CovarianceTriple& cov,
                                        double eig_floor = DecorrelationRecord::kDefaultEps0);

/// Least-squares Koopman matrix C00^{-1} C01; for a shared indicator basis
/// this is the Markov-state-model transition matrix estimate.
Eigen::MatrixXd koopman_matrix(const CovarianceTriple& cov,
                               double eig_floor = DecorrelationRecord::kDefaultEps0);

/// Transition-density reconstruction on the bins of an indicator basis:
/// P(y|x) = sum_i s_i f_i(x) g_i(y) mu(y), evaluated at bin centers.
/// `stationary_weights` must be nonnegative and sum to 1.
Eigen::MatrixXd reconstruct_transition_density(const KoopmanModel& model,
                                               const Eigen::VectorXd& stationary_weights);

/// Fit on data: accumulate moments, de-correlate, whiten, decompose.
/// k = 0 means full rank (min of the whitened dimensions).
KoopmanModel estimate_koopman_model(const TrajectoryCollection& data, const BasisSpec& basis0,
                                    const BasisSpec& basis1, Eigen::Index tau_steps,
                                    Eigen::Index k = 0,
                                    double eps0 = DecorrelationRecord::kDefaultEps0);

/// Fit from precomputed raw moments (same pipeline, no data pass).
KoopmanModel estimate_koopman_model(const BasisMoments& moments, const BasisSpec& basis0,
                                    const BasisSpec& basis1, Eigen::Index k = 0,
                                    double eps0 = DecorrelationRecord::kDefaultEps0);

} // namespace vamp
