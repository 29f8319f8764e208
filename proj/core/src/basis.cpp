#include "vamp/basis.hpp"

#include "vamp/errors.hpp"
#include "vamp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vamp {

Eigen::Index BasisSpec::size() const {
    if (kind == BasisKind::IndicatorGrid) {
        Eigen::Index m = 1;
        for (const auto b : bins_per_dim) m *= b;
        return m;
    }
    return centers.rows();
}

void BasisSpec::validate() const {
    if (domain_bounds.rows() < 1) throw data_error("basis needs at least one dimension");
    for (Eigen::Index d = 0; d < domain_bounds.rows(); ++d) {
        if (!(domain_bounds(d, 0) < domain_bounds(d, 1))) {
            throw data_error("domain bounds must satisfy lo < hi");
        }
    }
    if (kind == BasisKind::IndicatorGrid) {
        if (static_cast<Eigen::Index>(bins_per_dim.size()) != domain_bounds.rows()) {
            throw data_error("bins_per_dim must match the domain dimension");
        }
        for (const auto b : bins_per_dim) {
            if (b < 1) throw data_error("bin counts must be >= 1");
        }
    } else {
        if (centers.rows() < 1) throw data_error("rbf basis needs at least one center");
        if (centers.cols() != domain_bounds.rows()) {
            throw data_error("rbf centers must match the domain dimension");
        }
        if (!(w >= 0.0) || !std::isfinite(w)) throw data_error("rbf smoothing w must be >= 0");
        for (Eigen::Index i = 0; i < centers.rows(); ++i) {
            for (Eigen::Index d = 0; d < centers.cols(); ++d) {
                if (centers(i, d) < domain_bounds(d, 0) || centers(i, d) > domain_bounds(d, 1)) {
                    throw data_error("rbf center outside domain bounds");
                }
            }
        }
    }
}

BasisSpec make_indicator_grid(const Eigen::MatrixX2d& bounds,
                              const std::vector<Eigen::Index>& bins_per_dim) {
    BasisSpec spec;
    spec.kind = BasisKind::IndicatorGrid;
    spec.domain_bounds = bounds;
    spec.bins_per_dim = bins_per_dim;
    spec.validate();
    return spec;
}

BasisSpec make_rbf(const Eigen::MatrixX2d& bounds, const Eigen::MatrixXd& centers, double w) {
    BasisSpec spec;
    spec.kind = BasisKind::NormalizedRbf;
    spec.domain_bounds = bounds;
    spec.centers = centers;
    spec.w = w;
    spec.validate();
    return spec;
}

BasisSpec make_uniform_rbf_1d(double lo, double hi, Eigen::Index m, double w) {
    Eigen::MatrixX2d bounds(1, 2);
    bounds << lo, hi;
    Eigen::MatrixXd centers(m, 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        centers(i, 0) = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(m);
    }
    return make_rbf(bounds, centers, w);
}

Eigen::MatrixXd indicator_bin_centers(const BasisSpec& spec) {
    if (spec.kind != BasisKind::IndicatorGrid) throw data_error("not an indicator basis");
    const Eigen::Index d = spec.dim();
    const Eigen::Index m = spec.size();
    Eigen::MatrixXd centers(m, d);
    for (Eigen::Index flat = 0; flat < m; ++flat) {
        Eigen::Index rest = flat;
        for (Eigen::Index k = d; k-- > 0;) {
            const Eigen::Index bins = spec.bins_per_dim[static_cast<std::size_t>(k)];
            const Eigen::Index idx = rest % bins;
            rest /= bins;
            const double lo = spec.domain_bounds(k, 0);
            const double hi = spec.domain_bounds(k, 1);
            centers(flat, k) = lo + (static_cast<double>(idx) + 0.5) * (hi - lo) / static_cast<double>(bins);
        }
    }
    return centers;
}

Eigen::Index indicator_bin_index(const BasisSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (spec.kind != BasisKind::IndicatorGrid) throw data_error("not an indicator basis");
    if (x.size() != spec.dim()) throw data_error("point dimension mismatch");
    if (!x.allFinite()) throw data_error("non-finite state vector");
    Eigen::Index flat = 0;
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        const Eigen::Index bins = spec.bins_per_dim[static_cast<std::size_t>(k)];
        const double lo = spec.domain_bounds(k, 0);
        const double hi = spec.domain_bounds(k, 1);
        const double width = (hi - lo) / static_cast<double>(bins);
        auto idx = static_cast<Eigen::Index>(std::floor((x[k] - lo) / width));
        idx = std::clamp<Eigen::Index>(idx, 0, bins - 1);
        flat = flat * bins + idx;
    }
    return flat;
}

Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                  const Eigen::Ref<const Eigen::MatrixXd>& centers) {
    if (points.cols() != centers.cols()) throw data_error("point/center dimension mismatch");
    // |x - c|^2 = |x|^2 - 2 x.c + |c|^2, then floor tiny negatives at zero.
    Eigen::MatrixXd d2 = -2.0 * points * centers.transpose();
    d2.colwise() += points.rowwise().squaredNorm();
    d2.rowwise() += centers.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

Eigen::MatrixXd rbf_features_from_distances(const Eigen::Ref<const Eigen::MatrixXd>& sq_dist,
                                            double w) {
    Eigen::MatrixXd logits = (-w) * sq_dist;
    // Subtract the row max before exponentiating so large w cannot underflow
    // every term at once.
    const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    Eigen::MatrixXd feats = logits.array().exp().matrix();
    const Eigen::VectorXd norm = feats.rowwise().sum();
    feats.array().colwise() /= norm.array();
    return feats;
}

Eigen::VectorXd evaluate_basis(const BasisSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (!x.allFinite()) throw data_error("non-finite state vector");
    if (x.size() != spec.dim()) throw data_error("point dimension mismatch");
    if (spec.kind == BasisKind::IndicatorGrid) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.size());
        v[indicator_bin_index(spec, x)] = 1.0;
        return v;
    }
    const Eigen::MatrixXd d2 = squared_distances(x.transpose(), spec.centers);
    return rbf_features_from_distances(d2, spec.w).row(0);
}

Eigen::MatrixXd evaluate_basis_batch(const BasisSpec& spec,
                                     const Eigen::Ref<const Eigen::MatrixXd>& points) {
    if (!points.allFinite()) throw data_error("non-finite state values");
    if (points.cols() != spec.dim()) throw data_error("point dimension mismatch");
    if (spec.kind == BasisKind::IndicatorGrid) {
        Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(points.rows(), spec.size());
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            feats(i, indicator_bin_index(spec, points.row(i).transpose())) = 1.0;
        }
        return feats;
    }
    return rbf_features_from_distances(squared_distances(points, spec.centers), spec.w);
}

namespace {

Eigen::MatrixXd stack_points(const TrajectoryCollection& data) {
    data.validate();
    Eigen::MatrixXd points(data.total_steps(), data.dim());
    Eigen::Index row = 0;
    for (const auto& t : data.trajectories) {
        points.middleRows(row, t.rows()) = t;
        row += t.rows();
    }
    return points;
}

} // namespace

Eigen::MatrixXd kmeans_centers(const TrajectoryCollection& data, Eigen::Index m,
                               std::uint64_t seed) {
    return kmeans_centers(stack_points(data), m, seed);
}

Eigen::MatrixXd kmeans_centers(const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::Index m,
                               std::uint64_t seed) {
    const Eigen::Index n = points.rows();
    if (m < 1) throw data_error("k-means needs m >= 1");
    if (n < m) throw data_error("fewer samples than requested centers");

    // Distinct-point initialization: scan a seeded permutation, skipping
    // points equal to one already chosen.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed, /*stream=*/0x6b6d65616e73); // "kmeans"
    rng.shuffle(order);

    Eigen::MatrixXd centers(m, points.cols());
    Eigen::Index chosen = 0;
    for (const auto idx : order) {
        bool duplicate = false;
        for (Eigen::Index c = 0; c < chosen; ++c) {
            if (centers.row(c) == points.row(idx)) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        centers.row(chosen++) = points.row(idx);
        if (chosen == m) break;
    }
    if (chosen < m) {
        throw data_error("m exceeds the number of distinct sample points");
    }

    std::vector<Eigen::Index> assignment(static_cast<std::size_t>(n), -1);
    constexpr int kMaxIterations = 100;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Eigen::MatrixXd d2 = squared_distances(points, centers);
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best;
            d2.row(i).minCoeff(&best);
            if (assignment[static_cast<std::size_t>(i)] != best) {
                assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, points.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
            counts[assignment[static_cast<std::size_t>(i)]] += 1.0;
        }
        for (Eigen::Index c = 0; c < m; ++c) {
            if (counts[c] > 0.0) {
                centers.row(c) = sums.row(c) / counts[c];
            } else {
                // Reseed an empty cluster with the point farthest from its
                // assigned center.
                Eigen::Index farthest = 0;
                double far_d2 = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double dist =
                        (points.row(i) - centers.row(assignment[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (dist > far_d2) {
                        far_d2 = dist;
                        farthest = i;
                    }
                }
                centers.row(c) = points.row(farthest);
            }
        }
    }
    return centers;
}

} // namespace vamp
