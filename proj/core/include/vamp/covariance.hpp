#pragma once

#include "vamp/basis.hpp"
#include "vamp/trajectory.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace vamp {

struct DecorrelationRecord; // whitening.hpp

/// Raw second-moment statistics of a featurized lagged-pair set: everything
/// covariance estimation, de-correlation, and bootstrap recombination need
/// from one pass over the data.
///
///   sum0  = sum_t chi0(x_t),          sum1  = sum_t chi1(x_{t+tau})
///   s00   = sum_t chi0 chi0^T,        s11   = sum_t chi1 chi1^T
///   s01   = sum_t chi0(x_t) chi1(x_{t+tau})^T
///
/// Sums run over all lagged pairs. Accumulation is chunked with compensated
/// reduction so combining partial sums in any order agrees to ~1e-12.
struct BasisMoments {
    Eigen::VectorXd sum0;
    Eigen::VectorXd sum1;
    Eigen::MatrixXd s00;
    Eigen::MatrixXd s01;
    Eigen::MatrixXd s11;
    std::int64_t pair_count = 0;
    Eigen::Index lag_steps = 0;

    Eigen::VectorXd mean0() const { return sum0 / static_cast<double>(pair_count); }
    Eigen::VectorXd mean1() const { return sum1 / static_cast<double>(pair_count); }

    BasisMoments& operator+=(const BasisMoments& other);
};

/// Instantaneous and time-lagged covariance matrices of featurized data:
/// C00 over pair starts, C11 over pair ends, C01 across. C00 and C11 are
/// symmetrized after accumulation. `whitening` is set when the features
/// were passed through a de-correlation transform.
struct CovarianceTriple {
    Eigen::MatrixXd c00;
    Eigen::MatrixXd c01;
    Eigen::MatrixXd c11;
    std::int64_t pair_count = 0;
    Eigen::Index lag_steps = 0;
    std::shared_ptr<const DecorrelationRecord> whitening;
};

/// One pass over the data: featurize with chi0/chi1 and accumulate moments
/// of all (x_t, x_{t+tau}) pairs. Pairs never cross trajectory boundaries.
/// Throws if no pairs exist or features turn out non-finite.
BasisMoments accumulate_moments(const TrajectoryCollection& data, const BasisSpec& basis0,
                                const BasisSpec& basis1, Eigen::Index tau_steps);

/// Per-trajectory partial moments (for cross-validation folds, bootstrap
/// resampling, or concurrent reduction). Trajectories shorter than the lag
/// yield empty entries with pair_count 0.
std::vector<BasisMoments> per_trajectory_moments(const TrajectoryCollection& data,
                                                 const BasisSpec& basis0, const BasisSpec& basis1,
                                                 Eigen::Index tau_steps);

/// Combine partial moments; entries may repeat (bootstrap resampling).
BasisMoments combine_moments(const std::vector<BasisMoments>& parts,
                             const std::vector<std::size_t>& indices);

/// Plain covariance estimate C = moments / pair_count, Eq.-style direct
/// estimator with no reweighting.
CovarianceTriple covariances_from_moments(const BasisMoments& moments);

/// Convenience wrapper: accumulate and normalize in one call.
CovarianceTriple estimate_covariances(const TrajectoryCollection& data, const BasisSpec& basis0,
                                      const BasisSpec& basis1, Eigen::Index tau_steps);

/// Moments of an exactly known discrete-state pair distribution: occupation
/// weights rho0 over states, transition matrix `transition` at the given
/// lag. Features are the one-hot state indicators, so the second moments
/// are diag(rho0), diag(rho0) P, diag(rho1) with rho1 = P^T rho0.
BasisMoments exact_indicator_moments(const Eigen::VectorXd& rho0,
                                     const Eigen::MatrixXd& transition, Eigen::Index lag_steps);

} // namespace vamp
