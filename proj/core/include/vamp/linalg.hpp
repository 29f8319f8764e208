#pragma once

#include <Eigen/Core>

namespace vamp::linalg {

/// Result of a thin SVD A = U diag(s) V^T with singular values descending
/// and a deterministic sign choice: the first entry of each left singular
/// vector with magnitude above 1e-12 is made nonnegative.
struct Svd {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};

Svd thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Symmetric eigendecomposition with eigenvalues sorted descending and the
/// same sign convention applied to eigenvectors.
struct SymEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // columns
};

SymEig sym_eig(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// M^{-1/2} for a symmetric positive definite matrix via eigendecomposition.
/// Throws numerical_error if any eigenvalue is at or below `floor` (which
/// signals a basis that was not de-correlated).
Eigen::MatrixXd sym_inverse_sqrt(const Eigen::Ref<const Eigen::MatrixXd>& m, double floor);

/// Sum of the r-th powers of the singular values (Schatten r-norm to the r).
double schatten_norm_pow(const Eigen::Ref<const Eigen::MatrixXd>& a, int r);

/// Flip column signs so each column's first entry with |e| > 1e-12 is
/// nonnegative; `paired` columns are flipped in lockstep.
void fix_column_signs(Eigen::MatrixXd& columns, Eigen::MatrixXd* paired = nullptr);

/// Order-insensitive compensated (Neumaier) accumulator for matrices; keeps
/// reduction error below 1e-12 regardless of how partial sums arrive.
class CompensatedMatrixSum {
public:
    CompensatedMatrixSum(Eigen::Index rows, Eigen::Index cols)
        : sum_(Eigen::MatrixXd::Zero(rows, cols)), comp_(Eigen::MatrixXd::Zero(rows, cols)) {}

    void add(const Eigen::Ref<const Eigen::MatrixXd>& term);
    Eigen::MatrixXd value() const { return sum_ + comp_; }

private:
    Eigen::MatrixXd sum_;
    Eigen::MatrixXd comp_;
};

} // namespace vamp::linalg
