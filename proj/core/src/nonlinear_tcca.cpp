#include "vamp/nonlinear_tcca.hpp"

#include "vamp/errors.hpp"
#include "vamp/scores.hpp"
#include "vamp/whitening.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace vamp {

GoldenSectionResult golden_section_maximize(const std::function<double(double)>& objective,
                                            const GoldenSectionConfig& cfg) {
    if (!(cfg.log_lo < cfg.log_hi) || !(cfg.tol > 0.0)) {
        throw data_error("golden-section config needs log_lo < log_hi and tol > 0");
    }

    std::map<double, double> memo;
    const auto probe = [&](double x) {
        const auto it = memo.find(x);
        if (it != memo.end()) return it->second;
        double value = objective(x);
        if (std::isnan(value)) value = -std::numeric_limits<double>::infinity();
        memo.emplace(x, value);
        return value;
    };

    double a = cfg.log_lo;
    double b = cfg.log_hi;
    double c = 0.618 * a + 0.382 * b;
    double d = 0.382 * a + 0.618 * b;

    int iterations = 0;
    while (std::abs(a - b) >= cfg.tol && iterations < cfg.max_iterations) {
        ++iterations;
        const double fa = probe(a);
        const double fb = probe(b);
        const double fc = probe(c);
        const double fd = probe(d);
        // Keep the half whose points look best: [a, d] when the left pair
        // {a, c} beats the right pair {d, b}, the [c, b] half otherwise
        // (ties go right). Dropping a point only happens when a retained
        // point is at least as good, so the final readout can never be
        // worse than any probe, endpoints included.
        if (std::max(fa, fc) > std::max(fd, fb)) {
            const double new_b = d;
            const double new_d = c;
            c = 0.618 * a + 0.382 * new_b;
            b = new_b;
            d = new_d;
        } else {
            const double new_a = c;
            const double new_c = d;
            d = 0.618 * b + 0.382 * new_a;
            a = new_a;
            c = new_c;
        }
    }

    GoldenSectionResult best;
    best.iterations = iterations;
    best.log_x = a;
    best.value = probe(a);
    for (const double x : {b, c, d}) {
        const double v = probe(x);
        if (v > best.value) {
            best.value = v;
            best.log_x = x;
        }
    }
    return best;
}

WOptimum optimize_w(const TrajectoryCollection& data, const BasisSpec& rbf_template,
                    Eigen::Index tau_steps, const GoldenSectionConfig& cfg, double eps0) {
    if (rbf_template.kind != BasisKind::NormalizedRbf) {
        throw data_error("w optimization needs a normalized-rbf basis");
    }

    const auto pairs = lagged_pair_count(data, tau_steps);
    const auto objective = [&, pairs](double log_w) {
        try {
            BasisSpec basis = rbf_template;
            basis.w = std::exp(log_w);
            if (pairs <= basis.size()) {
                throw data_error("not enough pairs to whiten " + std::to_string(basis.size()) +
                                 " features");
            }
            const BasisMoments moments = accumulate_moments(data, basis, basis, tau_steps);
            auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(moments, eps0));
            const CovarianceTriple cov = whitened_covariances(moments, std::move(record));
            return vamp_r_matrix(cov, cfg.r, eps0);
        } catch (const error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    const GoldenSectionResult res = golden_section_maximize(objective, cfg);
    if (std::isinf(res.value)) {
        throw numerical_error("every probed w produced degenerate covariances");
    }
    WOptimum opt;
    opt.log_w = res.log_x;
    opt.w = std::exp(res.log_x);
    opt.objective = res.value;
    opt.iterations = res.iterations;
    return opt;
}

KoopmanModel nonlinear_tcca(const TrajectoryCollection& data, const BasisSpec& rbf_template,
                            Eigen::Index tau_steps, Eigen::Index k,
                            const GoldenSectionConfig& cfg, double eps0) {
    const WOptimum opt = optimize_w(data, rbf_template, tau_steps, cfg, eps0);
    BasisSpec basis = rbf_template;
    basis.w = opt.w;
    return estimate_koopman_model(data, basis, basis, tau_steps, k, eps0);
}

} // namespace vamp
