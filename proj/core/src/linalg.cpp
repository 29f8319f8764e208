#include "vamp/linalg.hpp"

#include "vamp/errors.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace vamp::linalg {

void fix_column_signs(Eigen::MatrixXd& columns, Eigen::MatrixXd* paired) {
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        double lead = 0.0;
        for (Eigen::Index i = 0; i < columns.rows(); ++i) {
            if (std::abs(columns(i, j)) > 1e-12) {
                lead = columns(i, j);
                break;
            }
        }
        if (lead < 0.0) {
            columns.col(j) = -columns.col(j);
            if (paired && j < paired->cols()) paired->col(j) = -paired->col(j);
        }
    }
}

Svd thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    fix_column_signs(out.u, &out.v);
    return out;
}

SymEig sym_eig(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
    // Eigen sorts ascending; flip to descending.
    SymEig out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    fix_column_signs(out.vectors);
    return out;
}

Eigen::MatrixXd sym_inverse_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m, double floor) {
    const SymEig eig = sym_eig(m);
    if (eig.values.size() == 0 || eig.values.minCoeff() <= floor) {
        throw numerical_error(
            "matrix is numerically singular (eigenvalue at or below " + std::to_string(floor) +
            "); covariances were likely estimated from a basis that was not de-correlated");
    }
    return eig.vectors * eig.values.array().rsqrt().matrix().asDiagonal() * eig.vectors.transpose();
}

double schatten_norm_pow(const Eigen::Ref<const Eigen::MatrixXd>& a, int r) {
    if (r < 1) throw data_error("Schatten order r must be >= 1");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    double total = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        total += std::pow(svd.singularValues()[i], r);
    }
    return total;
}

void CompensatedMatrixSum::add(const Eigen::Ref<const Eigen::MatrixXd>& term) {
    for (Eigen::Index j = 0; j < sum_.cols(); ++j) {
        for (Eigen::Index i = 0; i < sum_.rows(); ++i) {
            const double a = sum_(i, j);
            const double b = term(i, j);
            const double t = a + b;
            if (std::abs(a) >= std::abs(b)) {
                comp_(i, j) += (a - t) + b;
            } else {
                comp_(i, j) += (b - t) + a;
            }
            sum_(i, j) = t;
        }
    }
}

} // namespace vamp::linalg
