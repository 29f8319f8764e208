#pragma once

#include "vamp/tcca.hpp"

#include <functional>

namespace vamp {

/// Search window and stopping rule for the smoothing-parameter search:
/// log w runs over [-6, 6], the interval stops shrinking at 1e-3, and the
/// objective is the basis-set VAMP-r optimum with r = 2.
struct GoldenSectionConfig {
    double log_lo = -6.0;
    double log_hi = 6.0;
    double tol = 1e-3;
    int r = 2;
    int max_iterations = 200; // safety cap; the default window needs ~20
};

struct GoldenSectionResult {
    double log_x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Golden-section maximization with a four-point state: endpoints a, b and
/// interior points c, d at the golden sections. Every iteration keeps the
/// half interval whose best point wins (left pair {a, c} vs right pair
/// {d, b}, ties going right), so the bracket shrinks by the golden ratio
/// until |a - b| < tol; the best probed point of the final four is
/// returned. Probes are memoized, the objective runs once per distinct
/// point, and a probe returning -inf (evaluation failure) simply never
/// wins. The result is never worse than any probed point, in particular
/// not worse than either endpoint.
GoldenSectionResult golden_section_maximize(const std::function<double(double)>& objective,
                                            const GoldenSectionConfig& cfg = {});

struct WOptimum {
    double w = 0.0;
    double log_w = 0.0;
    double objective = 0.0;
    int iterations = 0;
};

/// Optimize the RBF smoothing parameter by golden-section search on
/// R_2(w) = ||C00(w)^{-1/2} C01(w) C11(w)^{-1/2}||_r^r with de-correlated
/// covariances rebuilt at every probed w. A probe whose covariances are
/// degenerate scores -inf and the search continues.
WOptimum optimize_w(const TrajectoryCollection& data, const BasisSpec& rbf_template,
                    Eigen::Index tau_steps, const GoldenSectionConfig& cfg = {},
                    double eps0 = DecorrelationRecord::kDefaultEps0);

/// Feature TCCA at the optimized w: search, then fit at w*. k = 0 means
/// full rank. The returned model's basis records w*.
KoopmanModel nonlinear_tcca(const TrajectoryCollection& data, const BasisSpec& rbf_template,
                            Eigen::Index tau_steps, Eigen::Index k = 0,
                            const GoldenSectionConfig& cfg = {},
                            double eps0 = DecorrelationRecord::kDefaultEps0);

} // namespace vamp
