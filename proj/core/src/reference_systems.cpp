#include "vamp/reference_systems.hpp"

#include "vamp/errors.hpp"
#include "vamp/linalg.hpp"
#include "vamp/rng.hpp"
#include "vamp/threading.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <vector>

namespace vamp {

namespace {

/// Stationary distribution of a row-stochastic matrix: solve mu^T P = mu^T
/// with the normalization sum(mu) = 1 substituted for one equation.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd mu = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(rhs);

    const double residual = ((p.transpose() * mu - mu).cwiseAbs()).maxCoeff();
    if (!mu.allFinite() || residual > 1e-10) {
        throw numerical_error("stationary distribution solve failed (residual " +
                              std::to_string(residual) + ")");
    }
    if (mu.minCoeff() <= 0.0) {
        throw numerical_error("stationary distribution has non-positive entries");
    }
    return mu / mu.sum();
}

/// Exact singular components of the discrete operator at the stationary
/// start: eigendecomposition of Kbar Kbar^T with Kbar = D^{1/2} P D^{-1/2}.
void fill_singular_components(TruthModel& truth, Eigen::Index k_components) {
    const Eigen::Index b = truth.bins();
    const Eigen::VectorXd sqrt_mu = truth.stationary.cwiseSqrt();
    const Eigen::MatrixXd kbar =
        sqrt_mu.asDiagonal() * truth.lag_matrix * sqrt_mu.cwiseInverse().asDiagonal();

    const linalg::SymEig eig = linalg::sym_eig(kbar * kbar.transpose());
    truth.sigma = eig.values.cwiseMax(0.0).cwiseSqrt();
    truth.sum_sigma_sq = eig.values.sum();

    const Eigen::Index kc = std::min(k_components, b);
    Eigen::MatrixXd u = eig.vectors.leftCols(kc);
    Eigen::MatrixXd v(b, kc);
    for (Eigen::Index i = 0; i < kc; ++i) {
        if (truth.sigma[i] > 1e-12) {
            v.col(i) = kbar.transpose() * u.col(i) / truth.sigma[i];
        } else {
            v.col(i).setZero();
        }
    }
    linalg::fix_column_signs(u, &v);
    truth.psi = sqrt_mu.cwiseInverse().asDiagonal() * u;
    truth.phi = sqrt_mu.cwiseInverse().asDiagonal() * v;
}

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, Eigen::Index exponent) {
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
    while (exponent > 0) {
        if (exponent & 1) result = result * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    return result;
}

/// Precomputed cumulative rows for inverse-CDF sampling of a finite chain.
class ChainSampler {
public:
    ChainSampler(const Eigen::VectorXd& initial, const Eigen::MatrixXd& transition) {
        cum_init_ = cumulative(initial);
        cum_rows_.reserve(static_cast<std::size_t>(transition.rows()));
        for (Eigen::Index i = 0; i < transition.rows(); ++i) {
            cum_rows_.push_back(cumulative(transition.row(i).transpose()));
        }
    }

    Eigen::Index initial_state(RngStream& rng) const { return pick(cum_init_, rng.u01()); }
    Eigen::Index next_state(Eigen::Index from, RngStream& rng) const {
        return pick(cum_rows_[static_cast<std::size_t>(from)], rng.u01());
    }

private:
    static std::vector<double> cumulative(const Eigen::VectorXd& weights) {
        std::vector<double> cum(static_cast<std::size_t>(weights.size()));
        double total = 0.0;
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            total += weights[i];
            cum[static_cast<std::size_t>(i)] = total;
        }
        cum.back() = 1.0; // guard against round-off at the top end
        return cum;
    }

    static Eigen::Index pick(const std::vector<double>& cum, double u) {
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        return static_cast<Eigen::Index>(std::min<std::ptrdiff_t>(
            std::distance(cum.begin(), it), static_cast<std::ptrdiff_t>(cum.size()) - 1));
    }

    std::vector<double> cum_init_;
    std::vector<std::vector<double>> cum_rows_;
};

/// Fill one trajectory per (seed, index) stream, possibly on several
/// workers; the first exception is rethrown after all workers join.
TrajectoryCollection generate_trajectories(
    int n_traj, int threads, double dt, std::uint64_t seed,
    const std::function<Eigen::MatrixXd(RngStream&, std::size_t)>& make_one) {
    if (n_traj < 1) throw data_error("need n_traj >= 1");
    TrajectoryCollection out;
    out.dt = dt;
    out.trajectories.resize(static_cast<std::size_t>(n_traj));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(static_cast<std::size_t>(n_traj), threads, [&](std::size_t s) {
        try {
            RngStream rng(seed, static_cast<std::uint64_t>(s) + 1);
            out.trajectories[s] = make_one(rng, s);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace

double TruthModel::relative_hs_error(Eigen::Index k) const {
    if (k < 0 || k > sigma.size()) throw data_error("rank out of range");
    const double head = sigma.head(k).squaredNorm();
    const double tail = std::max(0.0, sum_sigma_sq - head);
    return std::sqrt(tail / sum_sigma_sq);
}

Eigen::MatrixXd TruthModel::truncated_density(Eigen::Index k) const {
    if (k < 1 || k > psi.cols()) throw data_error("rank outside the tabulated components");
    return psi.leftCols(k) * sigma.head(k).asDiagonal() * phi.leftCols(k).transpose() *
           stationary.asDiagonal();
}

TruthModel build_onedim_truth(Eigen::Index k_components) {
    constexpr Eigen::Index kBins = 2000;
    constexpr double kLow = -20.0;
    constexpr double kHigh = 20.0;
    constexpr double kVariance = 10.0;

    TruthModel truth;
    truth.bin_basis = make_indicator_grid((Eigen::MatrixX2d(1, 2) << kLow, kHigh).finished(),
                                          {kBins});
    truth.bin_centers = indicator_bin_centers(truth.bin_basis);
    truth.lag_steps = 1;
    truth.dt = 1.0;

    Eigen::MatrixXd p(kBins, kBins);
    for (Eigen::Index i = 0; i < kBins; ++i) {
        const double s = truth.bin_centers(i, 0);
        const double drift = s / 2.0 + 7.0 * s / (1.0 + 0.12 * s * s) + 6.0 * std::cos(s);
        for (Eigen::Index j = 0; j < kBins; ++j) {
            const double diff = truth.bin_centers(j, 0) - drift;
            p(i, j) = std::exp(-diff * diff / (2.0 * kVariance));
        }
        p.row(i) /= p.row(i).sum();
    }
    truth.step_matrix = p;
    truth.lag_matrix = std::move(p);
    truth.stationary = stationary_distribution(truth.step_matrix);
    fill_singular_components(truth, k_components);
    return truth;
}

TrajectoryCollection simulate_onedim(const TruthModel& truth, int n_traj, Eigen::Index length,
                                     std::uint64_t seed, int threads) {
    if (length < 2) throw data_error("need length >= 2");
    const ChainSampler sampler(truth.stationary, truth.step_matrix);
    const double lo = truth.bin_basis.domain_bounds(0, 0);
    const double width = (truth.bin_basis.domain_bounds(0, 1) - lo) /
                         static_cast<double>(truth.bins());

    return generate_trajectories(
        n_traj, threads, truth.dt, seed, [&](RngStream& rng, std::size_t) {
            Eigen::MatrixXd traj(length, 1);
            Eigen::Index bin = sampler.initial_state(rng);
            for (Eigen::Index t = 0; t < length; ++t) {
                traj(t, 0) = lo + (static_cast<double>(bin) + rng.u01()) * width;
                if (t + 1 < length) bin = sampler.next_state(bin, rng);
            }
            return traj;
        });
}

TruthModel build_double_gyre_truth(Eigen::Index k_components) {
    constexpr double kA = 0.25;
    constexpr double kEps = 0.1;
    constexpr double kStep = 0.02;
    constexpr double kLagTime = 2.0;
    constexpr Eigen::Index kBinsX = 50;
    constexpr Eigen::Index kBinsY = 25;

    TruthModel truth;
    truth.bin_basis = make_indicator_grid(
        (Eigen::MatrixX2d(2, 2) << 0.0, 2.0, 0.0, 1.0).finished(), {kBinsX, kBinsY});
    truth.bin_centers = indicator_bin_centers(truth.bin_basis);
    truth.dt = kStep;
    truth.lag_steps = static_cast<Eigen::Index>(std::llround(kLagTime / kStep));

    const Eigen::Index b = truth.bin_basis.size();
    // One Euler-Maruyama step of size kStep: mean drift * kStep, variance
    // (diffusion)^2 * kStep.
    const double var_y = kEps * kEps * kStep;

    // The one-step kernel factorizes over the two coordinates, so each row
    // is an outer product of 1-D Gaussian profiles evaluated at bin centers.
    Eigen::VectorXd centers_x(kBinsX);
    Eigen::VectorXd centers_y(kBinsY);
    for (Eigen::Index ix = 0; ix < kBinsX; ++ix) centers_x[ix] = (ix + 0.5) * (2.0 / kBinsX);
    for (Eigen::Index iy = 0; iy < kBinsY; ++iy) centers_y[iy] = (iy + 0.5) * (1.0 / kBinsY);

    Eigen::MatrixXd p(b, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const double x = truth.bin_centers(i, 0);
        const double y = truth.bin_centers(i, 1);
        const double mean_x = x - M_PI * kA * std::sin(M_PI * x) * std::cos(M_PI * y) * kStep;
        const double mean_y = y + M_PI * kA * std::cos(M_PI * x) * std::sin(M_PI * y) * kStep;
        const double var_x = kEps * kEps * (x / 4.0 + 1.0) * kStep;

        Eigen::VectorXd px(kBinsX);
        for (Eigen::Index jx = 0; jx < kBinsX; ++jx) {
            const double d = centers_x[jx] - mean_x;
            px[jx] = std::exp(-d * d / (2.0 * var_x));
        }
        Eigen::VectorXd py(kBinsY);
        for (Eigen::Index jy = 0; jy < kBinsY; ++jy) {
            const double d = centers_y[jy] - mean_y;
            py[jy] = std::exp(-d * d / (2.0 * var_y));
        }
        for (Eigen::Index jx = 0; jx < kBinsX; ++jx) {
            for (Eigen::Index jy = 0; jy < kBinsY; ++jy) {
                p(i, jx * kBinsY + jy) = px[jx] * py[jy];
            }
        }
        p.row(i) /= p.row(i).sum();
    }

    truth.step_matrix = std::move(p);
    truth.lag_matrix = matrix_power(truth.step_matrix, truth.lag_steps);
    truth.stationary = stationary_distribution(truth.step_matrix);
    fill_singular_components(truth, k_components);
    return truth;
}

TrajectoryCollection simulate_double_gyre(const TruthModel& truth, int n_traj, double length_time,
                                          std::uint64_t seed, int threads) {
    const double steps_real = length_time / truth.dt;
    const auto steps = static_cast<Eigen::Index>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 || steps < 2) {
        throw data_error("length_time must be a multiple of the step size 0.02, >= 2 steps");
    }

    const ChainSampler sampler(truth.stationary, truth.step_matrix);
    const auto& spec = truth.bin_basis;
    const Eigen::Index bins_y = spec.bins_per_dim[1];
    const double wx = (spec.domain_bounds(0, 1) - spec.domain_bounds(0, 0)) /
                      static_cast<double>(spec.bins_per_dim[0]);
    const double wy = (spec.domain_bounds(1, 1) - spec.domain_bounds(1, 0)) /
                      static_cast<double>(bins_y);

    return generate_trajectories(
        n_traj, threads, truth.dt, seed, [&](RngStream& rng, std::size_t) {
            Eigen::MatrixXd traj(steps, 2);
            Eigen::Index bin = sampler.initial_state(rng);
            for (Eigen::Index t = 0; t < steps; ++t) {
                const Eigen::Index ix = bin / bins_y;
                const Eigen::Index iy = bin % bins_y;
                traj(t, 0) = spec.domain_bounds(0, 0) + (static_cast<double>(ix) + rng.u01()) * wx;
                traj(t, 1) = spec.domain_bounds(1, 0) + (static_cast<double>(iy) + rng.u01()) * wy;
                if (t + 1 < steps) bin = sampler.next_state(bin, rng);
            }
            return traj;
        });
}

TrajectoryCollection simulate_lorenz(int n_traj, double length_time, std::uint64_t seed,
                                     double noise, int threads) {
    constexpr double kDt = 0.005;
    constexpr double kS = 10.0;
    constexpr double kR = 28.0;
    constexpr double kB = 8.0 / 3.0;
    constexpr double kBurnInTime = 2.0;
    constexpr double kDivergenceBound = 1e6;

    const double steps_real = length_time / kDt;
    const auto steps = static_cast<Eigen::Index>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 || steps < 2) {
        throw data_error("length_time must be a multiple of the step size 0.005, >= 2 steps");
    }
    const auto burn_in = static_cast<Eigen::Index>(std::llround(kBurnInTime / kDt));
    const double sqrt_dt = std::sqrt(kDt);

    return generate_trajectories(
        n_traj, threads, kDt, seed, [&](RngStream& rng, std::size_t s) {
            double x = -20.0 + 40.0 * rng.u01();
            double y = -25.0 + 50.0 * rng.u01();
            double z = 5.0 + 40.0 * rng.u01();

            Eigen::MatrixXd traj(steps, 3);
            for (Eigen::Index t = 0; t < burn_in + steps; ++t) {
                const double nx = x + kS * (y - x) * kDt + noise * x * sqrt_dt * rng.normal();
                const double ny =
                    y + (kR * x - y - x * z) * kDt + noise * y * sqrt_dt * rng.normal();
                const double nz = z + (-kB * z + x * y) * kDt + noise * z * sqrt_dt * rng.normal();
                x = nx;
                y = ny;
                z = nz;
                if (std::abs(x) > kDivergenceBound || std::abs(y) > kDivergenceBound ||
                    std::abs(z) > kDivergenceBound) {
                    throw numerical_error("Lorenz trajectory " + std::to_string(s) +
                                          " diverged at step " + std::to_string(t) +
                                          " (|state| > 1e6); reduce the noise or step");
                }
                if (t >= burn_in) {
                    traj(t - burn_in, 0) = x;
                    traj(t - burn_in, 1) = y;
                    traj(t - burn_in, 2) = z;
                }
            }
            return traj;
        });
}

Eigen::Matrix<double, 6, 1> eta_map(double x, double y, double z) {
    const double radius = z / 50.0 + 0.5;
    const double phase_x = M_PI * x / 30.0 + z / 50.0 - 1.0;
    const double phase_y = M_PI * y / 30.0 + z / 50.0 - 1.0;
    Eigen::Matrix<double, 6, 1> eta;
    eta << radius * std::cos(phase_x), radius * std::sin(phase_x), radius * std::cos(phase_y),
        radius * std::sin(phase_y), std::cos(M_PI * (x + y) / 40.0),
        std::cos(M_PI * (x - y) / 40.0);
    return eta;
}

TrajectoryCollection eta_transform(const TrajectoryCollection& xyz) {
    xyz.validate();
    if (xyz.dim() != 3) throw data_error("eta transform needs 3-dimensional trajectories");
    TrajectoryCollection out;
    out.dt = xyz.dt;
    out.labels = xyz.labels;
    for (const auto& traj : xyz.trajectories) {
        Eigen::MatrixXd mapped(traj.rows(), 6);
        for (Eigen::Index t = 0; t < traj.rows(); ++t) {
            mapped.row(t) = eta_map(traj(t, 0), traj(t, 1), traj(t, 2)).transpose();
        }
        out.trajectories.push_back(std::move(mapped));
    }
    return out;
}

} // namespace vamp
