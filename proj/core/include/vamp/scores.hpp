#pragma once

#include "vamp/reference_systems.hpp"
#include "vamp/tcca.hpp"

#include <string>

namespace vamp {

enum class ScoreKind { VampR, VampE, SubspaceVampR };

struct ScoreSpec {
    ScoreKind kind = ScoreKind::VampE;
    int r = 2; // used by the r-variants

    std::string name() const;
    static ScoreSpec parse(const std::string& kind_name, int r);
};

/// VAMP-r score of a model on the given covariances (train or test):
/// sum_i (u_i^T C01 v_i)^r.
double vamp_r(const KoopmanModel& model, const CovarianceTriple& cov, int r);

/// Basis-set optimum of VAMP-r: the Schatten-r norm (to the r) of
/// C00^{-1/2} C01 C11^{-1/2}; equals vamp_r at full rank. This is the
/// objective maximized when optimizing basis parameters.
double vamp_r_matrix(const CovarianceTriple& cov, int r,
                     double eig_floor = DecorrelationRecord::kDefaultEps0);

/// VAMP-E score tr[2 S U^T C01 V - S U^T C00 U S V^T C11 V]. Inversion
/// free, so it stays finite on rank-deficient test covariances.
double vamp_e(const KoopmanModel& model, const CovarianceTriple& cov);

/// Subspace VAMP-r validation score
/// ||(U^T C00 U)^{-1/2} (U^T C01 V) (V^T C11 V)^{-1/2}||_r^r.
/// Invariant under invertible column transforms of U and V. Throws
/// singular_test_covariance when a projected covariance is singular.
double subspace_vamp_r(const KoopmanModel& model, const CovarianceTriple& cov_test, int r);

/// Dispatch on a ScoreSpec.
double evaluate_score(const ScoreSpec& spec, const KoopmanModel& model,
                      const CovarianceTriple& cov);

struct HsError {
    double absolute = 0.0;
    double relative = 0.0;
};

/// Hilbert-Schmidt error of a model against an exact oracle, computed two
/// ways: directly as the weighted Frobenius distance between the model's
/// reconstruction and the oracle operator, and through the score identity
/// ||Khat - K||^2 = -R_E + sum_i sigma_i^2. The two routes must agree to
/// 1e-6 or a numerical_error is thrown. The model's bases must be the
/// oracle's own bin partition.
HsError hs_error_vs_oracle(const KoopmanModel& model, const TruthModel& truth);

} // namespace vamp
