#include "vamp/tcca.hpp"

#include "vamp/errors.hpp"
#include "vamp/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace vamp {

namespace {

Eigen::MatrixXd featurize(const BasisSpec& basis, const DecorrelationRecord* rec, bool left,
                          const Eigen::Ref<const Eigen::MatrixXd>& points) {
    Eigen::MatrixXd feats = evaluate_basis_batch(basis, points);
    if (!rec) return feats;
    return left ? apply_decorrelation0(*rec, feats) : apply_decorrelation1(*rec, feats);
}

} // namespace

Eigen::MatrixXd KoopmanModel::evaluate_left(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    return featurize(basis0, decorrelation.get(), true, points) * u;
}

Eigen::MatrixXd KoopmanModel::evaluate_right(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    return featurize(basis1, decorrelation.get(), false, points) * v;
}

Eigen::MatrixXd whitened_koopman_matrix(const CovarianceTriple& cov, double eig_floor) {
    const Eigen::MatrixXd inv_sqrt00 = linalg::sym_inverse_sqrt(cov.c00, eig_floor);
    const Eigen::MatrixXd inv_sqrt11 = linalg::sym_inverse_sqrt(cov.c11, eig_floor);
    return inv_sqrt00 * cov.c01 * inv_sqrt11;
}

KoopmanModel feature_tcca(const CovarianceTriple& cov, Eigen::Index k, const BasisSpec& basis0,
                          const BasisSpec& basis1, double eig_floor) {
    const Eigen::Index max_rank = std::min(cov.c00.rows(), cov.c11.rows());
    if (k < 1 || k > max_rank) {
        throw data_error("rank k=" + std::to_string(k) + " out of range [1, " +
                         std::to_string(max_rank) + "]");
    }

    const Eigen::MatrixXd inv_sqrt00 = linalg::sym_inverse_sqrt(cov.c00, eig_floor);
    const Eigen::MatrixXd inv_sqrt11 = linalg::sym_inverse_sqrt(cov.c11, eig_floor);
    const Eigen::MatrixXd kbar = inv_sqrt00 * cov.c01 * inv_sqrt11;
    const linalg::Svd svd = linalg::thin_svd(kbar);

    KoopmanModel model;
    model.singular_values = svd.s.head(k);
    model.u = inv_sqrt00 * svd.u.leftCols(k);
    model.v = inv_sqrt11 * svd.v.leftCols(k);
    model.basis0 = basis0;
    model.basis1 = basis1;
    model.decorrelation = cov.whitening;
    model.lag_steps = cov.lag_steps;
    return model;
}

Eigen::MatrixXd koopman_matrix(const CovarianceTriple& cov, double eig_floor) {
    const linalg::SymEig eig = linalg::sym_eig(cov.c00);
    if (eig.values.minCoeff() <= eig_floor) {
        throw numerical_error("C00 is numerically singular; de-correlate the basis first");
    }
    return Eigen::LDLT<Eigen::MatrixXd>(cov.c00).solve(cov.c01);
}

Eigen::MatrixXd reconstruct_transition_density(const KoopmanModel& model,
                                               const Eigen::VectorXd& stationary_weights) {
    if (model.basis0.kind != BasisKind::IndicatorGrid ||
        model.basis1.kind != BasisKind::IndicatorGrid) {
        throw data_error("transition-density reconstruction needs indicator bases");
    }
    if (stationary_weights.size() != model.basis1.size()) {
        throw data_error("weight vector does not match the basis size");
    }
    if (stationary_weights.minCoeff() < 0.0 ||
        std::abs(stationary_weights.sum() - 1.0) > 1e-8) {
        throw data_error("weights must be nonnegative and sum to 1");
    }

    const Eigen::MatrixXd left = model.evaluate_left(indicator_bin_centers(model.basis0));
    const Eigen::MatrixXd right = model.evaluate_right(indicator_bin_centers(model.basis1));
    return left * model.singular_values.asDiagonal() * right.transpose() *
           stationary_weights.asDiagonal();
}

KoopmanModel estimate_koopman_model(const BasisMoments& moments, const BasisSpec& basis0,
                                    const BasisSpec& basis1, Eigen::Index k, double eps0) {
    auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(moments, eps0));
    const CovarianceTriple cov = whitened_covariances(moments, std::move(record));
    const Eigen::Index full = std::min(cov.c00.rows(), cov.c11.rows());
    return feature_tcca(cov, k == 0 ? full : k, basis0, basis1, eps0);
}

KoopmanModel estimate_koopman_model(const TrajectoryCollection& data, const BasisSpec& basis0,
                                    const BasisSpec& basis1, Eigen::Index tau_steps,
                                    Eigen::Index k, double eps0) {
    const auto pairs = lagged_pair_count(data, tau_steps);
    if (pairs <= basis0.size() || pairs <= basis1.size()) {
        throw data_error("not enough lagged pairs (" + std::to_string(pairs) +
                         ") for bases of size " + std::to_string(basis0.size()) + "/" +
                         std::to_string(basis1.size()));
    }
    return estimate_koopman_model(accumulate_moments(data, basis0, basis1, tau_steps), basis0,
                                  basis1, k, eps0);
}

} // namespace vamp
