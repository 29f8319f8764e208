#include "vamp/scores.hpp"

#include "vamp/errors.hpp"
#include "vamp/linalg.hpp"

#include <cmath>

namespace vamp {

namespace {

void check_dims(const KoopmanModel& model, const CovarianceTriple& cov) {
    if (model.u.rows() != cov.c00.rows() || model.v.rows() != cov.c11.rows() ||
        cov.c01.rows() != cov.c00.rows() || cov.c01.cols() != cov.c11.rows()) {
        throw data_error("model/covariance dimension mismatch");
    }
}

/// Inverse square root of a small projected covariance; relative threshold
/// because these are test-set quantities with no conditioning guarantee.
Eigen::MatrixXd projected_inverse_sqrt(const Eigen::MatrixXd& m, const char* what) {
    const linalg::SymEig eig = linalg::sym_eig((m + m.transpose()) / 2.0);
    const double top = eig.values.size() ? eig.values[0] : 0.0;
    if (top <= 0.0 || eig.values.minCoeff() <= 1e-12 * top) {
        throw singular_test_covariance(std::string(what) +
                                       " is singular; the validation score cannot be reliably "
                                       "computed on this test set");
    }
    return eig.vectors * eig.values.array().rsqrt().matrix().asDiagonal() * eig.vectors.transpose();
}

} // namespace

std::string ScoreSpec::name() const {
    switch (kind) {
        case ScoreKind::VampR: return "vamp-" + std::to_string(r);
        case ScoreKind::VampE: return "vamp-e";
        case ScoreKind::SubspaceVampR: return "subspace-vamp-" + std::to_string(r);
    }
    return "?";
}

ScoreSpec ScoreSpec::parse(const std::string& kind_name, int r) {
    if (r < 1) throw data_error("score order r must be >= 1");
    ScoreSpec spec;
    spec.r = r;
    if (kind_name == "vampe" || kind_name == "vamp-e") {
        spec.kind = ScoreKind::VampE;
    } else if (kind_name == "vampr" || kind_name == "vamp-r") {
        spec.kind = ScoreKind::VampR;
    } else if (kind_name == "subspace-vampr" || kind_name == "subspace-vamp-r") {
        spec.kind = ScoreKind::SubspaceVampR;
    } else {
        throw data_error("unknown score kind '" + kind_name + "'");
    }
    return spec;
}

double vamp_r(const KoopmanModel& model, const CovarianceTriple& cov, int r) {
    if (r < 1) throw data_error("r must be >= 1");
    check_dims(model, cov);
    double total = 0.0;
    for (Eigen::Index i = 0; i < model.rank(); ++i) {
        total += std::pow(model.u.col(i).dot(cov.c01 * model.v.col(i)), r);
    }
    return total;
}

double vamp_r_matrix(const CovarianceTriple& cov, int r, double eig_floor) {
    return linalg::schatten_norm_pow(whitened_koopman_matrix(cov, eig_floor), r);
}

double vamp_e(const KoopmanModel& model, const CovarianceTriple& cov) {
    check_dims(model, cov);
    const Eigen::MatrixXd s = model.singular_values.asDiagonal();
    const Eigen::MatrixXd cross = model.u.transpose() * cov.c01 * model.v;
    const Eigen::MatrixXd cff = model.u.transpose() * cov.c00 * model.u;
    const Eigen::MatrixXd cgg = model.v.transpose() * cov.c11 * model.v;
    return (2.0 * s * cross - s * cff * s * cgg).trace();
}

double subspace_vamp_r(const KoopmanModel& model, const CovarianceTriple& cov_test, int r) {
    if (r < 1) throw data_error("r must be >= 1");
    check_dims(model, cov_test);
    const Eigen::MatrixXd inv_sqrt_ff =
        projected_inverse_sqrt(model.u.transpose() * cov_test.c00 * model.u, "U^T C00 U");
    const Eigen::MatrixXd inv_sqrt_gg =
        projected_inverse_sqrt(model.v.transpose() * cov_test.c11 * model.v, "V^T C11 V");
    const Eigen::MatrixXd cross = model.u.transpose() * cov_test.c01 * model.v;
    return linalg::schatten_norm_pow(inv_sqrt_ff * cross * inv_sqrt_gg, r);
}

double evaluate_score(const ScoreSpec& spec, const KoopmanModel& model,
                      const CovarianceTriple& cov) {
    switch (spec.kind) {
        case ScoreKind::VampR: return vamp_r(model, cov, spec.r);
        case ScoreKind::VampE: return vamp_e(model, cov);
        case ScoreKind::SubspaceVampR: return subspace_vamp_r(model, cov, spec.r);
    }
    throw data_error("unhandled score kind");
}

HsError hs_error_vs_oracle(const KoopmanModel& model, const TruthModel& truth) {
    if (model.basis0 != truth.bin_basis || model.basis1 != truth.bin_basis) {
        throw data_error("state-space mismatch: model bases must be the oracle bin partition");
    }
    if (model.lag_steps != truth.lag_steps) {
        throw data_error("state-space mismatch: model lag differs from the oracle lag");
    }

    // Direct route: weighted Frobenius distance on the oracle bins. With
    // stationary start the pair-start and pair-end weights are both mu.
    const Eigen::VectorXd sqrt_mu = truth.stationary.cwiseSqrt();
    const Eigen::MatrixXd left = model.evaluate_left(truth.bin_centers);
    const Eigen::MatrixXd right = model.evaluate_right(truth.bin_centers);
    const Eigen::MatrixXd model_side = sqrt_mu.asDiagonal() * left *
                                       model.singular_values.asDiagonal() * right.transpose() *
                                       sqrt_mu.asDiagonal();
    const Eigen::MatrixXd truth_side =
        sqrt_mu.asDiagonal() * truth.lag_matrix * sqrt_mu.cwiseInverse().asDiagonal();
    const double direct = (model_side - truth_side).norm();

    // Score route: -R_E on the exact covariances plus the oracle constant.
    const BasisMoments exact =
        exact_indicator_moments(truth.stationary, truth.lag_matrix, truth.lag_steps);
    const CovarianceTriple cov = model.decorrelation
                                     ? whitened_covariances(exact, model.decorrelation)
                                     : covariances_from_moments(exact);
    const double re = vamp_e(model, cov);
    const double via_score = std::sqrt(std::max(0.0, truth.sum_sigma_sq - re));

    if (std::abs(direct - via_score) > 1e-6) {
        throw numerical_error("Hilbert-Schmidt error routes disagree: direct " +
                              std::to_string(direct) + " vs score identity " +
                              std::to_string(via_score));
    }

    HsError err;
    err.absolute = direct;
    err.relative = direct / std::sqrt(truth.sum_sigma_sq);
    return err;
}

} // namespace vamp
