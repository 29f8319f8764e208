// Command-line front end: simulate reference systems, estimate models,
// score them, cross-validate hyper-parameters, and export oracle data.

#include "vamp/crossval.hpp"
#include "vamp/csv.hpp"
#include "vamp/errors.hpp"
#include "vamp/model_io.hpp"
#include "vamp/nonlinear_tcca.hpp"
#include "vamp/reference_systems.hpp"
#include "vamp/scores.hpp"
#include "vamp/tcca.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace {

using namespace vamp;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

Eigen::MatrixX2d parse_domain(const std::string& text) {
    std::vector<std::pair<double, double>> dims;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw data_error("domain must look like lo:hi[,lo:hi...], got '" + text + "'");
        }
        dims.emplace_back(csv::parse_double(part.substr(0, colon)),
                          csv::parse_double(part.substr(colon + 1)));
    }
    if (dims.empty()) throw data_error("empty domain specification");
    Eigen::MatrixX2d bounds(static_cast<Eigen::Index>(dims.size()), 2);
    for (std::size_t d = 0; d < dims.size(); ++d) {
        bounds(static_cast<Eigen::Index>(d), 0) = dims[d].first;
        bounds(static_cast<Eigen::Index>(d), 1) = dims[d].second;
    }
    return bounds;
}

Eigen::Index parse_k(const std::string& text) {
    if (text == "full" || text.empty()) return 0;
    const long value = std::stol(text);
    if (value < 1) throw data_error("k must be a positive integer or 'full'");
    return static_cast<Eigen::Index>(value);
}

CenterPlacement parse_centers(const std::string& text) {
    if (text == "auto") return CenterPlacement::Auto;
    if (text == "uniform") return CenterPlacement::Uniform;
    if (text == "kmeans") return CenterPlacement::KMeans;
    throw data_error("centers must be auto, uniform, or kmeans");
}

/// Flags shared by estimate and cv.
struct BasisFlags {
    std::string basis = "rbf";
    std::string centers = "auto";
    double w = 1.0;
    bool w_set = false;
    bool optimize_w = false;
    std::string log_w_range;
    double w_tol = 1e-3;
    std::string domain;

    void attach(CLI::App* cmd) {
        cmd->add_option("--basis", basis, "Feature family: indicator or rbf")
            ->check(CLI::IsMember({"indicator", "rbf"}));
        cmd->add_option("--centers", centers, "RBF center placement: auto, uniform, kmeans")
            ->check(CLI::IsMember({"auto", "uniform", "kmeans"}));
        cmd->add_option("--w", w, "RBF smoothing parameter")->each([this](const std::string&) {
            w_set = true;
        });
        cmd->add_flag("--optimize-w", optimize_w,
                      "Optimize w by golden-section search on the VAMP-2 objective");
        cmd->add_option("--log-w-range", log_w_range, "Search window lo:hi in log w (default -6:6)");
        cmd->add_option("--w-tol", w_tol, "Search termination tolerance on |a-b|");
        cmd->add_option("--domain", domain,
                        "Basis domain lo:hi[,lo:hi...]; defaults to the data bounding box");
    }

    void validate_combo() const {
        if (basis == "indicator" && optimize_w) {
            throw data_error("--optimize-w applies to rbf bases only");
        }
        if (optimize_w && w_set) {
            throw data_error("pass either --w or --optimize-w, not both");
        }
    }

    GoldenSectionConfig golden() const {
        GoldenSectionConfig cfg;
        cfg.tol = w_tol;
        if (!log_w_range.empty()) {
            const auto colon = log_w_range.find(':');
            if (colon == std::string::npos) throw data_error("--log-w-range must be lo:hi");
            cfg.log_lo = csv::parse_double(log_w_range.substr(0, colon));
            cfg.log_hi = csv::parse_double(log_w_range.substr(colon + 1));
        }
        return cfg;
    }

    std::optional<Eigen::MatrixX2d> bounds() const {
        if (domain.empty()) return std::nullopt;
        return parse_domain(domain);
    }
};

TruthModel build_truth(const std::string& system, Eigen::Index k_components) {
    if (system == "onedim") return build_onedim_truth(k_components);
    if (system == "double-gyre") return build_double_gyre_truth(k_components);
    throw data_error("no exact oracle for system '" + system + "'");
}

int cmd_simulate(const std::string& system, int n_traj, double length, std::uint64_t seed,
                 const std::string& out, double noise, int threads) {
    TrajectoryCollection data;
    if (system == "onedim") {
        const auto steps = static_cast<Eigen::Index>(std::llround(length));
        if (std::abs(length - static_cast<double>(steps)) > 1e-9) {
            throw data_error("onedim length is a step count and must be an integer");
        }
        const TruthModel truth = build_onedim_truth(1);
        data = simulate_onedim(truth, n_traj, steps, seed, threads);
    } else if (system == "double-gyre") {
        const TruthModel truth = build_double_gyre_truth(1);
        data = simulate_double_gyre(truth, n_traj, length, seed, threads);
    } else if (system == "lorenz") {
        data = simulate_lorenz(n_traj, length, seed, noise, threads);
    } else if (system == "lorenz-eta") {
        data = eta_transform(simulate_lorenz(n_traj, length, seed, noise, threads));
    } else {
        throw data_error("unknown system '" + system + "'");
    }
    save_trajectories(out, data);
    std::cout << "wrote " << data.size() << " trajectories of " << data.trajectories[0].rows()
              << " steps (dim " << data.dim() << ", dt " << csv::format_double(data.dt) << ") to "
              << out << "\n";
    return kExitOk;
}

struct EstimateResult {
    KoopmanModel model;
    CovarianceTriple train_cov;
    std::optional<WOptimum> w_opt;
};

EstimateResult fit_model(const TrajectoryCollection& data, const BasisFlags& flags,
                         Eigen::Index m, Eigen::Index lag, Eigen::Index k, std::uint64_t seed,
                         double eps0) {
    flags.validate_combo();
    HyperParamPoint theta;
    theta.basis_kind = flags.basis == "indicator" ? BasisKind::IndicatorGrid
                                                  : BasisKind::NormalizedRbf;
    theta.m = m;
    theta.lag_steps = lag;
    theta.centers = parse_centers(flags.centers);

    EstimateResult result;
    BasisSpec basis;
    if (theta.basis_kind == BasisKind::NormalizedRbf && flags.optimize_w) {
        BasisSpec tmpl = build_basis(theta, data, seed, 1.0, flags.bounds());
        result.w_opt = optimize_w(data, tmpl, lag, flags.golden(), eps0);
        tmpl.w = result.w_opt->w;
        basis = std::move(tmpl);
    } else {
        basis = build_basis(theta, data, seed, flags.w, flags.bounds());
    }

    const auto pairs = lagged_pair_count(data, lag);
    if (pairs <= basis.size()) {
        throw data_error("not enough lagged pairs (" + std::to_string(pairs) + ") for m=" +
                         std::to_string(basis.size()));
    }
    const BasisMoments moments = accumulate_moments(data, basis, basis, lag);
    auto record = std::make_shared<DecorrelationRecord>(decorrelate_moments(moments, eps0));
    result.train_cov = whitened_covariances(moments, std::move(record));
    const Eigen::Index full = std::min(result.train_cov.c00.rows(), result.train_cov.c11.rows());
    result.model = feature_tcca(result.train_cov, k == 0 ? full : k, basis, basis, eps0);
    return result;
}

int cmd_estimate(const std::string& data_dir, std::optional<double> dt, const BasisFlags& flags,
                 Eigen::Index m, Eigen::Index lag, const std::string& k_text, std::uint64_t seed,
                 double eps0, const std::string& out) {
    const TrajectoryCollection data = load_trajectories(data_dir, dt);
    const EstimateResult fit =
        fit_model(data, flags, m, lag, parse_k(k_text), seed, eps0);

    save_model(out, fit.model);

    std::cout << "data: " << data.size() << " trajectories, " << data.total_steps()
              << " steps, dim " << data.dim() << ", dt " << csv::format_double(data.dt) << "\n";
    std::cout << "lag: " << lag << " steps = " << csv::format_double(lag * data.dt)
              << " time units\n";
    std::cout << "basis: " << (fit.model.basis0.kind == BasisKind::IndicatorGrid ? "indicator" : "rbf")
              << " m=" << fit.model.basis0.size();
    if (fit.model.basis0.kind == BasisKind::NormalizedRbf) {
        std::cout << " w=" << csv::format_double(fit.model.basis0.w);
    }
    std::cout << "\n";
    if (fit.w_opt) {
        std::cout << "w search: log w*=" << csv::format_double(fit.w_opt->log_w) << ", objective="
                  << csv::format_double(fit.w_opt->objective) << ", iterations="
                  << fit.w_opt->iterations << "\n";
    }
    std::cout << "whitened dims: " << fit.train_cov.c00.rows() << " x "
              << fit.train_cov.c11.rows() << ", k=" << fit.model.rank() << "\n";
    std::cout << "singular values:";
    for (Eigen::Index i = 0; i < fit.model.rank(); ++i) {
        std::cout << ' ' << csv::format_double(fit.model.singular_values[i]);
    }
    std::cout << "\n";
    std::cout << "training vamp-2 score: "
              << csv::format_double(vamp_r(fit.model, fit.train_cov, 2)) << "\n";
    std::cout << "training vamp-e score: "
              << csv::format_double(vamp_e(fit.model, fit.train_cov)) << "\n";
    std::cout << "model written to " << out << "\n";
    return kExitOk;
}

int cmd_score(const std::string& model_file, const std::string& data_dir,
              std::optional<double> dt, const std::string& score_name, int r) {
    const KoopmanModel model = load_model(model_file);
    const TrajectoryCollection data = load_trajectories(data_dir, dt);
    const ScoreSpec spec = ScoreSpec::parse(score_name, r);

    const BasisMoments moments =
        accumulate_moments(data, model.basis0, model.basis1, model.lag_steps);
    const CovarianceTriple cov = model.decorrelation
                                     ? whitened_covariances(moments, model.decorrelation)
                                     : covariances_from_moments(moments);
    const double value = evaluate_score(spec, model, cov);

    std::cout << "score_kind,r,k,value\n";
    std::cout << score_name << ',';
    if (spec.kind != ScoreKind::VampE) std::cout << spec.r;
    std::cout << ',' << model.rank() << ',' << csv::format_double(value) << "\n";
    return kExitOk;
}

int cmd_cv(const std::string& data_dir, std::optional<double> dt, const BasisFlags& flags,
           const std::vector<Eigen::Index>& m_grid, Eigen::Index lag, const std::string& k_text,
           int folds, Eigen::Index block_length, const std::string& score_name, int r,
           std::uint64_t seed, int threads, const std::string& out) {
    flags.validate_combo();
    const TrajectoryCollection data = load_trajectories(data_dir, dt);
    if (m_grid.empty()) throw data_error("--m-grid must list at least one basis size");

    Eigen::Index block = block_length;
    if (block == 0) {
        for (const auto& t : data.trajectories) block = std::max(block, t.rows());
    }
    const FoldAssignment assignment = split_folds(data, folds, block, seed);

    const Eigen::Index k = parse_k(k_text);
    std::vector<HyperParamPoint> grid;
    for (const auto m : m_grid) {
        HyperParamPoint theta;
        theta.basis_kind = flags.basis == "indicator" ? BasisKind::IndicatorGrid
                                                      : BasisKind::NormalizedRbf;
        theta.m = m;
        theta.lag_steps = lag;
        theta.centers = parse_centers(flags.centers);
        if (theta.basis_kind == BasisKind::NormalizedRbf && !flags.optimize_w) {
            theta.fixed_w = flags.w;
        }
        if (k != 0) theta.k = k;
        grid.push_back(theta);
    }

    CvOptions options;
    options.score = ScoreSpec::parse(score_name, r);
    options.seed = seed;
    options.threads = threads;
    options.golden = flags.golden();
    options.domain_bounds = flags.bounds();
    const CvReport report = cross_validate(data, grid, assignment, options);

    const std::string csv_text = report.to_csv();
    if (out.empty() || out == "-") {
        std::cout << csv_text;
    } else {
        std::ofstream file(out);
        if (!file) throw data_error("cannot write " + out);
        file << csv_text;
        std::cout << "selected theta " << report.selected << ": m="
                  << report.grid[report.selected].m << " (mcv "
                  << csv::format_double(report.mcv[report.selected]) << "), report written to "
                  << out << "\n";
    }
    return kExitOk;
}

int cmd_truth(const std::string& system, Eigen::Index k, const std::string& out) {
    const TruthModel truth = build_truth(system, k);
    fs::create_directories(out);

    csv::write_matrix(fs::path(out) / "sigma.csv", truth.sigma);

    const Eigen::Index d = truth.bin_centers.cols();
    Eigen::MatrixXd mu(truth.bins(), d + 1);
    mu << truth.bin_centers, truth.stationary;
    csv::write_matrix(fs::path(out) / "mu.csv", mu);

    const Eigen::Index kc = truth.psi.cols();
    Eigen::MatrixXd psi(truth.bins(), d + kc);
    psi << truth.bin_centers, truth.psi;
    csv::write_matrix(fs::path(out) / "psi.csv", psi);
    Eigen::MatrixXd phi(truth.bins(), d + kc);
    phi << truth.bin_centers, truth.phi;
    csv::write_matrix(fs::path(out) / "phi.csv", phi);

    std::cout << "wrote sigma.csv, mu.csv, psi.csv, phi.csv (" << kc << " components, "
              << truth.bins() << " bins) to " << out << "\n";
    std::cout << "rank-" << k << " relative HS error: "
              << csv::format_double(truth.relative_hs_error(k)) << "\n";
    return kExitOk;
}

int cmd_export_density(const std::string& system, Eigen::Index k, Eigen::Index stride,
                       const std::string& out) {
    if (stride < 1) throw data_error("--stride must be >= 1");
    const TruthModel truth = build_truth(system, k);
    fs::create_directories(out);

    const auto strided = [stride](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd s((m.rows() + stride - 1) / stride, (m.cols() + stride - 1) / stride);
        for (Eigen::Index i = 0; i < s.rows(); ++i)
            for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = m(i * stride, j * stride);
        return s;
    };

    csv::write_matrix(fs::path(out) / "exact_density.csv", strided(truth.lag_matrix));

    // Rank-k model through the estimation pipeline on exact covariances;
    // hs_error_vs_oracle cross-checks the two error routes.
    const BasisMoments exact =
        exact_indicator_moments(truth.stationary, truth.lag_matrix, truth.lag_steps);
    const KoopmanModel model = estimate_koopman_model(exact, truth.bin_basis, truth.bin_basis, k);
    const Eigen::MatrixXd density = reconstruct_transition_density(model, truth.stationary);
    csv::write_matrix(fs::path(out) / ("approx_density_k" + std::to_string(k) + ".csv"),
                      strided(density));

    const HsError err = hs_error_vs_oracle(model, truth);
    std::ofstream errors(fs::path(out) / "errors.csv");
    errors << "k,hs_abs,hs_rel\n"
           << k << ',' << csv::format_double(err.absolute) << ','
           << csv::format_double(err.relative) << "\n";
    std::cout << "rank-" << k << " relative HS error " << csv::format_double(err.relative)
              << "; wrote densities and errors.csv to " << out << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-rank linear (Koopman) models of Markov processes from time series:\n"
                 "estimation by whitened time-lagged CCA, VAMP scoring, cross-validation,\n"
                 "and exactly discretized reference systems."};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample a reference system to a CSV directory");
    std::string sim_system;
    int sim_n_traj = 10;
    double sim_length = 500;
    std::uint64_t sim_seed = 1;
    double sim_noise = 0.3;
    int sim_threads = static_cast<int>(std::thread::hardware_concurrency());
    std::string sim_out;
    sim->add_option("--system", sim_system, "onedim, double-gyre, lorenz, lorenz-eta")
        ->required()
        ->check(CLI::IsMember({"onedim", "double-gyre", "lorenz", "lorenz-eta"}));
    sim->add_option("--n-traj", sim_n_traj, "Number of trajectories");
    sim->add_option("--length", sim_length,
                    "Steps (onedim) or time units (double-gyre, lorenz)");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--noise", sim_noise, "Noise intensity (lorenz only)");
    sim->add_option("--threads", sim_threads, "Worker cap for trajectory generation");
    sim->add_option("--out", sim_out, "Output directory")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Fit a finite-rank model and write a model file");
    std::string est_data;
    double est_dt = 0.0;
    bool est_dt_set = false;
    BasisFlags est_flags;
    Eigen::Index est_m = 33;
    Eigen::Index est_lag = 1;
    std::string est_k = "full";
    std::uint64_t est_seed = 1;
    double est_eps0 = DecorrelationRecord::kDefaultEps0;
    std::string est_out;
    est->add_option("--data", est_data, "CSV directory")->required();
    est->add_option("--dt", est_dt, "Sampling interval override")->each([&](const std::string&) {
        est_dt_set = true;
    });
    est_flags.attach(est);
    est->add_option("--m", est_m, "Basis size");
    est->add_option("--lag", est_lag, "Lag in steps")->required();
    est->add_option("--k", est_k, "Model rank (positive integer or 'full')");
    est->add_option("--seed", est_seed, "Seed for k-means center placement");
    est->add_option("--eps0", est_eps0, "De-correlation eigenvalue threshold");
    est->add_option("--out", est_out, "Model file path")->required();

    // score
    auto* sc = app.add_subcommand("score", "Score a model file on a data set");
    std::string sc_model;
    std::string sc_data;
    double sc_dt = 0.0;
    bool sc_dt_set = false;
    std::string sc_score = "vampe";
    int sc_r = 2;
    sc->add_option("--model", sc_model, "Model file")->required();
    sc->add_option("--data", sc_data, "CSV directory")->required();
    sc->add_option("--dt", sc_dt, "Sampling interval override")->each([&](const std::string&) {
        sc_dt_set = true;
    });
    sc->add_option("--score", sc_score, "vampe, vampr, subspace-vampr")
        ->check(CLI::IsMember({"vampe", "vampr", "subspace-vampr"}));
    sc->add_option("--r", sc_r, "Order for the r-scores");

    // cv
    auto* cv = app.add_subcommand("cv", "Cross-validate hyper-parameters, emit a CSV report");
    std::string cv_data;
    double cv_dt = 0.0;
    bool cv_dt_set = false;
    BasisFlags cv_flags;
    std::vector<Eigen::Index> cv_m_grid;
    Eigen::Index cv_lag = 1;
    std::string cv_k = "full";
    int cv_folds = 5;
    Eigen::Index cv_block = 0;
    std::string cv_score = "vampe";
    int cv_r = 2;
    std::uint64_t cv_seed = 1;
    int cv_threads = static_cast<int>(std::thread::hardware_concurrency());
    std::string cv_out;
    cv->add_option("--data", cv_data, "CSV directory")->required();
    cv->add_option("--dt", cv_dt, "Sampling interval override")->each([&](const std::string&) {
        cv_dt_set = true;
    });
    cv_flags.attach(cv);
    cv->add_option("--m-grid", cv_m_grid, "Basis sizes, e.g. --m-grid 4 8 13 21 33")->required();
    cv->add_option("--lag", cv_lag, "Lag in steps")->required();
    cv->add_option("--k", cv_k, "Model rank during CV (integer or 'full')");
    cv->add_option("--folds", cv_folds, "Fold count J");
    cv->add_option("--block-length", cv_block,
                   "Block length L in steps (0 = whole trajectories)");
    cv->add_option("--score", cv_score, "Validation score: vampe, vampr, subspace-vampr")
        ->check(CLI::IsMember({"vampe", "vampr", "subspace-vampr"}));
    cv->add_option("--r", cv_r, "Order for the r-scores");
    cv->add_option("--seed", cv_seed, "Seed for folds and center placement");
    cv->add_option("--threads", cv_threads, "Worker cap for the grid");
    cv->add_option("--out", cv_out, "Report path ('-' for stdout)");

    // truth
    auto* tr = app.add_subcommand("truth", "Export exact oracle spectra and singular functions");
    std::string tr_system;
    Eigen::Index tr_k = 4;
    std::string tr_out;
    tr->add_option("--system", tr_system, "onedim or double-gyre")
        ->required()
        ->check(CLI::IsMember({"onedim", "double-gyre"}));
    tr->add_option("--k", tr_k, "Number of singular functions to export");
    tr->add_option("--out", tr_out, "Output directory")->required();

    // export-density
    auto* ed = app.add_subcommand("export-density",
                                  "Export exact and rank-k reconstructed transition densities");
    std::string ed_system;
    Eigen::Index ed_k = 4;
    Eigen::Index ed_stride = 1;
    std::string ed_out;
    ed->add_option("--system", ed_system, "onedim or double-gyre")
        ->required()
        ->check(CLI::IsMember({"onedim", "double-gyre"}));
    ed->add_option("--k", ed_k, "Reconstruction rank");
    ed->add_option("--stride", ed_stride, "Row/column subsampling stride for the exports");
    ed->add_option("--out", ed_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_system, sim_n_traj, sim_length, sim_seed, sim_out, sim_noise,
                                sim_threads);
        }
        if (est->parsed()) {
            return cmd_estimate(est_data,
                                est_dt_set ? std::optional<double>(est_dt) : std::nullopt,
                                est_flags, est_m, est_lag, est_k, est_seed, est_eps0, est_out);
        }
        if (sc->parsed()) {
            return cmd_score(sc_model, sc_data,
                             sc_dt_set ? std::optional<double>(sc_dt) : std::nullopt, sc_score,
                             sc_r);
        }
        if (cv->parsed()) {
            return cmd_cv(cv_data, cv_dt_set ? std::optional<double>(cv_dt) : std::nullopt,
                          cv_flags, cv_m_grid, cv_lag, cv_k, cv_folds, cv_block, cv_score, cv_r,
                          cv_seed, cv_threads, cv_out);
        }
        if (tr->parsed()) return cmd_truth(tr_system, tr_k, tr_out);
        if (ed->parsed()) return cmd_export_density(ed_system, ed_k, ed_stride, ed_out);
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
