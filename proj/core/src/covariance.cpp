#include "vamp/covariance.hpp"

#include "vamp/errors.hpp"
#include "vamp/linalg.hpp"

#include <algorithm>

namespace vamp {

namespace {

constexpr Eigen::Index kChunkRows = 4096;

struct MomentAccumulator {
    linalg::CompensatedMatrixSum sum0;
    linalg::CompensatedMatrixSum sum1;
    linalg::CompensatedMatrixSum s00;
    linalg::CompensatedMatrixSum s01;
    linalg::CompensatedMatrixSum s11;
    std::int64_t pairs = 0;

    MomentAccumulator(Eigen::Index n, Eigen::Index m)
        : sum0(n, 1), sum1(m, 1), s00(n, n), s01(n, m), s11(m, m) {}

    BasisMoments finish(Eigen::Index lag) const {
        BasisMoments out;
        out.sum0 = sum0.value();
        out.sum1 = sum1.value();
        out.s00 = s00.value();
        out.s01 = s01.value();
        out.s11 = s11.value();
        out.pair_count = pairs;
        out.lag_steps = lag;
        return out;
    }
};

void accumulate_trajectory(MomentAccumulator& acc, const Eigen::MatrixXd& traj,
                           const BasisSpec& basis0, const BasisSpec& basis1,
                           Eigen::Index tau_steps) {
    const Eigen::Index pairs = traj.rows() - tau_steps;
    if (pairs <= 0) return;

    // With a shared basis, featurize each sample once and slice the lagged
    // views out of one matrix.
    Eigen::MatrixXd feats0;
    Eigen::MatrixXd feats1;
    Eigen::Index offset1 = 0;
    if (basis0 == basis1) {
        feats0 = evaluate_basis_batch(basis0, traj);
        offset1 = tau_steps;
    } else {
        feats0 = evaluate_basis_batch(basis0, traj.topRows(pairs));
        feats1 = evaluate_basis_batch(basis1, traj.bottomRows(pairs));
    }
    const Eigen::MatrixXd& end_feats = feats1.size() > 0 ? feats1 : feats0;
    if (!feats0.allFinite() || !end_feats.allFinite()) {
        throw numerical_error("non-finite feature values during covariance accumulation");
    }

    for (Eigen::Index offset = 0; offset < pairs; offset += kChunkRows) {
        const Eigen::Index count = std::min(kChunkRows, pairs - offset);
        const auto x0 = feats0.middleRows(offset, count);
        const auto x1 = end_feats.middleRows(offset + offset1, count);
        acc.sum0.add(x0.colwise().sum().transpose());
        acc.sum1.add(x1.colwise().sum().transpose());
        acc.s00.add(x0.transpose() * x0);
        acc.s01.add(x0.transpose() * x1);
        acc.s11.add(x1.transpose() * x1);
        acc.pairs += count;
    }
}

} // namespace

BasisMoments& BasisMoments::operator+=(const BasisMoments& other) {
    if (other.pair_count == 0) return *this;
    if (pair_count == 0) {
        *this = other;
        return *this;
    }
    if (lag_steps != other.lag_steps) throw data_error("cannot combine moments at different lags");
    sum0 += other.sum0;
    sum1 += other.sum1;
    s00 += other.s00;
    s01 += other.s01;
    s11 += other.s11;
    pair_count += other.pair_count;
    return *this;
}

BasisMoments accumulate_moments(const TrajectoryCollection& data, const BasisSpec& basis0,
                                const BasisSpec& basis1, Eigen::Index tau_steps) {
    data.validate();
    basis0.validate();
    basis1.validate();
    if (tau_steps < 1) throw data_error("tau_steps must be >= 1");
    if (lagged_pair_count(data, tau_steps) == 0) {
        throw data_error("no lagged pairs at tau_steps=" + std::to_string(tau_steps));
    }

    MomentAccumulator acc(basis0.size(), basis1.size());
    for (const auto& traj : data.trajectories) {
        accumulate_trajectory(acc, traj, basis0, basis1, tau_steps);
    }
    return acc.finish(tau_steps);
}

std::vector<BasisMoments> per_trajectory_moments(const TrajectoryCollection& data,
                                                 const BasisSpec& basis0, const BasisSpec& basis1,
                                                 Eigen::Index tau_steps) {
    data.validate();
    basis0.validate();
    basis1.validate();
    if (tau_steps < 1) throw data_error("tau_steps must be >= 1");

    std::vector<BasisMoments> parts;
    parts.reserve(data.trajectories.size());
    for (const auto& traj : data.trajectories) {
        MomentAccumulator acc(basis0.size(), basis1.size());
        accumulate_trajectory(acc, traj, basis0, basis1, tau_steps);
        parts.push_back(acc.finish(tau_steps));
    }
    return parts;
}

BasisMoments combine_moments(const std::vector<BasisMoments>& parts,
                             const std::vector<std::size_t>& indices) {
    BasisMoments total;
    for (const auto idx : indices) {
        if (idx >= parts.size()) throw data_error("moment index out of range");
        total += parts[idx];
    }
    if (total.pair_count == 0) throw data_error("combined moments contain no pairs");
    return total;
}

CovarianceTriple covariances_from_moments(const BasisMoments& moments) {
    if (moments.pair_count == 0) throw data_error("no pairs accumulated");
    const double n = static_cast<double>(moments.pair_count);
    CovarianceTriple cov;
    cov.c00 = ((moments.s00 + moments.s00.transpose()) / (2.0 * n)).eval();
    cov.c11 = ((moments.s11 + moments.s11.transpose()) / (2.0 * n)).eval();
    cov.c01 = moments.s01 / n;
    cov.pair_count = moments.pair_count;
    cov.lag_steps = moments.lag_steps;
    return cov;
}

CovarianceTriple estimate_covariances(const TrajectoryCollection& data, const BasisSpec& basis0,
                                      const BasisSpec& basis1, Eigen::Index tau_steps) {
    return covariances_from_moments(accumulate_moments(data, basis0, basis1, tau_steps));
}

BasisMoments exact_indicator_moments(const Eigen::VectorXd& rho0,
                                     const Eigen::MatrixXd& transition, Eigen::Index lag_steps) {
    const Eigen::Index n = rho0.size();
    if (transition.rows() != n || transition.cols() != n) {
        throw data_error("transition matrix shape does not match the weight vector");
    }
    if (rho0.minCoeff() < 0.0) throw data_error("occupation weights must be nonnegative");

    BasisMoments m;
    m.sum0 = rho0;
    m.sum1 = transition.transpose() * rho0;
    m.s00 = rho0.asDiagonal();
    m.s01 = rho0.asDiagonal() * transition;
    m.s11 = Eigen::MatrixXd(m.sum1.asDiagonal());
    m.pair_count = 1; // expectations, not sums
    m.lag_steps = lag_steps;
    return m;
}

} // namespace vamp
