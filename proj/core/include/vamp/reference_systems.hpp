#pragma once

#include "vamp/basis.hpp"
#include "vamp/trajectory.hpp"

#include <Eigen/Core>
#include <cstdint>

namespace vamp {

/// Exact discretized oracle of a reference system: bin partition,
/// stationary distribution, transition matrices, and the exact singular
/// components of the discrete Koopman operator at the reference lag.
struct TruthModel {
    BasisSpec bin_basis;         // indicator grid over the state space
    Eigen::MatrixXd bin_centers; // B x d, in bin_basis flattening order
    Eigen::VectorXd stationary;  // mu over bins
    Eigen::MatrixXd step_matrix; // one-step transition matrix
    Eigen::MatrixXd lag_matrix;  // transition matrix at lag_steps
    Eigen::Index lag_steps = 1;
    double dt = 1.0;

    Eigen::VectorXd sigma;  // full singular spectrum, descending
    Eigen::MatrixXd psi;    // B x kc left singular functions on bins
    Eigen::MatrixXd phi;    // B x kc right singular functions on bins
    double sum_sigma_sq = 0.0; // squared Hilbert-Schmidt norm of the operator

    Eigen::Index bins() const { return stationary.size(); }

    /// Relative Hilbert-Schmidt error of the best rank-k truncation:
    /// sqrt(sum_{i>k} sigma_i^2 / sum_i sigma_i^2).
    double relative_hs_error(Eigen::Index k) const;

    /// Exact transition density matrix of the rank-k truncation on bins.
    Eigen::MatrixXd truncated_density(Eigen::Index k) const;
};

/// One-dimensional bistable map on [-20, 20], discretized into 2000 bins
/// with a Gaussian step kernel of variance 10 around the deterministic
/// drift x/2 + 7x/(1+0.12 x^2) + 6 cos x. Lag is one step.
/// `k_components` bounds how many singular functions are tabulated.
TruthModel build_onedim_truth(Eigen::Index k_components = 16);

/// Sample bin sequences from the chain started in the stationary
/// distribution; emitted states are uniform within the current bin.
/// Each trajectory draws from its own (seed, index) stream, so the output
/// is deterministic and independent of the worker count.
TrajectoryCollection simulate_onedim(const TruthModel& truth, int n_traj, Eigen::Index length,
                                     std::uint64_t seed, int threads = 1);

/// Stochastic double gyre on [0,2]x[0,1] (A = 0.25, eps = 0.1), spatially
/// discretized on a 50x25 grid with step size 0.02; the reference lag is
/// 2.0 time units = 100 steps, so lag_matrix = step_matrix^100.
TruthModel build_double_gyre_truth(Eigen::Index k_components = 16);

/// Sample the one-step discretized chain from a stationary start;
/// length_time must be an integer multiple of the 0.02 step.
TrajectoryCollection simulate_double_gyre(const TruthModel& truth, int n_traj, double length_time,
                                          std::uint64_t seed, int threads = 1);

/// Stochastic Lorenz system (s = 10, r = 28, b = 8/3) with multiplicative
/// noise, integrated by Euler-Maruyama at step 0.005 with three independent
/// Wiener increments. Starts uniform in [-20,20]x[-25,25]x[5,45], discards
/// a burn-in of 2 time units, then records length_time/0.005 steps.
/// Throws numerical_error if a trajectory diverges (|state| > 1e6).
TrajectoryCollection simulate_lorenz(int n_traj, double length_time, std::uint64_t seed,
                                     double noise = 0.3, int threads = 1);

/// The six bounded trigonometric observables of the Lorenz state.
Eigen::Matrix<double, 6, 1> eta_map(double x, double y, double z);

/// Apply eta_map row-wise to a 3-D collection.
TrajectoryCollection eta_transform(const TrajectoryCollection& xyz);

} // namespace vamp
