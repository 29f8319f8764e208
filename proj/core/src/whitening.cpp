#include "vamp/whitening.hpp"

#include "vamp/errors.hpp"
#include "vamp/linalg.hpp"

#include <cmath>

namespace vamp {

namespace {

// Eigenpairs of the mean-centered covariance with |lambda| > eps0, scaled to
// whiten: proj = diag(|lambda|^{-1/2}) Q^T.
Eigen::MatrixXd whitening_projection(const Eigen::MatrixXd& second_moment,
                                     const Eigen::VectorXd& mean, double eps0,
                                     const char* side) {
    const Eigen::MatrixXd cov =
        ((second_moment + second_moment.transpose()) / 2.0 - mean * mean.transpose()).eval();
    const linalg::SymEig eig = linalg::sym_eig(cov);

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (std::abs(eig.values[i]) > eps0) kept.push_back(i);
    }
    // kept may be empty (zero-variance data): the constant feature added by
    // the caller still spans something, so this is not an error by itself.
    Eigen::MatrixXd proj(static_cast<Eigen::Index>(kept.size()), cov.rows());
    for (std::size_t r = 0; r < kept.size(); ++r) {
        proj.row(static_cast<Eigen::Index>(r)) =
            eig.vectors.col(kept[r]).transpose() / std::sqrt(std::abs(eig.values[kept[r]]));
    }
    if (!proj.allFinite()) {
        throw numerical_error(std::string("de-correlation failed on the ") + side + " basis");
    }
    return proj;
}

} // namespace

DecorrelationRecord decorrelate_moments(const BasisMoments& moments, double eps0) {
    if (moments.pair_count == 0) throw data_error("no pairs accumulated");
    if (!(eps0 > 0.0)) throw data_error("eps0 must be positive");

    const double n = static_cast<double>(moments.pair_count);
    DecorrelationRecord rec;
    rec.eps0 = eps0;
    rec.mean0 = moments.mean0();
    rec.mean1 = moments.mean1();
    rec.proj0 = whitening_projection(moments.s00 / n, rec.mean0, eps0, "chi0");
    rec.proj1 = whitening_projection(moments.s11 / n, rec.mean1, eps0, "chi1");
    return rec;
}

DecorrelationRecord decorrelate(const TrajectoryCollection& data, const BasisSpec& basis0,
                                const BasisSpec& basis1, Eigen::Index tau_steps, double eps0) {
    const auto pairs = lagged_pair_count(data, tau_steps);
    if (pairs <= basis0.size() || pairs <= basis1.size()) {
        throw data_error("not enough lagged pairs (" + std::to_string(pairs) +
                         ") to estimate second moments of " + std::to_string(basis0.size()) + "/" +
                         std::to_string(basis1.size()) + " features");
    }
    return decorrelate_moments(accumulate_moments(data, basis0, basis1, tau_steps), eps0);
}

namespace {

Eigen::VectorXd apply_one(const Eigen::MatrixXd& proj, const Eigen::VectorXd& mean,
                          const Eigen::VectorXd& features) {
    if (features.size() != mean.size()) {
        throw data_error("feature length " + std::to_string(features.size()) +
                         " does not match de-correlation record (" + std::to_string(mean.size()) +
                         ")");
    }
    Eigen::VectorXd out(proj.rows() + 1);
    out.head(proj.rows()) = proj * (features - mean);
    out[proj.rows()] = 1.0;
    return out;
}

Eigen::MatrixXd apply_batch(const Eigen::MatrixXd& proj, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& features) {
    if (features.cols() != mean.size()) {
        throw data_error("feature width does not match de-correlation record");
    }
    Eigen::MatrixXd out(features.rows(), proj.rows() + 1);
    out.leftCols(proj.rows()) = (features.rowwise() - mean.transpose()) * proj.transpose();
    out.col(proj.rows()).setOnes();
    return out;
}

} // namespace

Eigen::VectorXd apply_decorrelation0(const DecorrelationRecord& rec, const Eigen::VectorXd& features) {
    return apply_one(rec.proj0, rec.mean0, features);
}

Eigen::VectorXd apply_decorrelation1(const DecorrelationRecord& rec, const Eigen::VectorXd& features) {
    return apply_one(rec.proj1, rec.mean1, features);
}

Eigen::MatrixXd apply_decorrelation0(const DecorrelationRecord& rec, const Eigen::MatrixXd& features) {
    return apply_batch(rec.proj0, rec.mean0, features);
}

Eigen::MatrixXd apply_decorrelation1(const DecorrelationRecord& rec, const Eigen::MatrixXd& features) {
    return apply_batch(rec.proj1, rec.mean1, features);
}

CovarianceTriple whitened_covariances(const BasisMoments& moments,
                                      std::shared_ptr<const DecorrelationRecord> record) {
    if (!record) throw data_error("missing de-correlation record");
    const auto& rec = *record;
    if (moments.sum0.size() != rec.mean0.size() || moments.sum1.size() != rec.mean1.size()) {
        throw data_error("moments do not match the de-correlation record dimensions");
    }

    const double n = static_cast<double>(moments.pair_count);
    const Eigen::VectorXd m0 = moments.mean0();
    const Eigen::VectorXd m1 = moments.mean1();
    const Eigen::VectorXd a0 = rec.proj0 * (m0 - rec.mean0);
    const Eigen::VectorXd a1 = rec.proj1 * (m1 - rec.mean1);

    // E[(chi - pi)(chi' - pi')^T] expanded around the record means; exact
    // algebra, identical to averaging the transformed features directly.
    const auto centered = [](const Eigen::MatrixXd& second, const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& pi_left, const Eigen::VectorXd& mean_right,
                             const Eigen::VectorXd& pi_right) {
        return (second - mean * pi_right.transpose() - pi_left * mean_right.transpose() +
                pi_left * pi_right.transpose())
            .eval();
    };

    const Eigen::MatrixXd g00 = centered(moments.s00 / n, m0, rec.mean0, m0, rec.mean0);
    const Eigen::MatrixXd g01 = centered(moments.s01 / n, m0, rec.mean0, m1, rec.mean1);
    const Eigen::MatrixXd g11 = centered(moments.s11 / n, m1, rec.mean1, m1, rec.mean1);

    const Eigen::Index d0 = rec.kept0();
    const Eigen::Index d1 = rec.kept1();

    CovarianceTriple cov;
    cov.c00.resize(d0 + 1, d0 + 1);
    cov.c00.topLeftCorner(d0, d0) = rec.proj0 * g00 * rec.proj0.transpose();
    cov.c00.topRightCorner(d0, 1) = a0;
    cov.c00.bottomLeftCorner(1, d0) = a0.transpose();
    cov.c00(d0, d0) = 1.0;
    cov.c00 = ((cov.c00 + cov.c00.transpose()) / 2.0).eval();

    cov.c11.resize(d1 + 1, d1 + 1);
    cov.c11.topLeftCorner(d1, d1) = rec.proj1 * g11 * rec.proj1.transpose();
    cov.c11.topRightCorner(d1, 1) = a1;
    cov.c11.bottomLeftCorner(1, d1) = a1.transpose();
    cov.c11(d1, d1) = 1.0;
    cov.c11 = ((cov.c11 + cov.c11.transpose()) / 2.0).eval();

    cov.c01.resize(d0 + 1, d1 + 1);
    cov.c01.topLeftCorner(d0, d1) = rec.proj0 * g01 * rec.proj1.transpose();
    cov.c01.topRightCorner(d0, 1) = a0;
    cov.c01.bottomLeftCorner(1, d1) = a1.transpose();
    cov.c01(d0, d1) = 1.0;

    cov.pair_count = moments.pair_count;
    cov.lag_steps = moments.lag_steps;
    cov.whitening = std::move(record);
    return cov;
}

} // namespace vamp
