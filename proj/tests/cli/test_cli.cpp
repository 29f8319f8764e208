// End-to-end tests of the command-line tool. The binary path arrives via
// the VAMP_CLI environment variable (set by ctest).

#include "vamp/csv.hpp"
#include "vamp/model_io.hpp"
#include "vamp/trajectory.hpp"
#include "support/chains.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* path = std::getenv("VAMP_CLI");
    REQUIRE(path != nullptr);
    return path;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const fs::path out_file =
        fs::temp_directory_path() / ("vamp_cli_out_" + std::to_string(counter++) + ".txt");
    const std::string command = cli_path() + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vamp_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Grab the value following "<label>: " on its own summary line.
std::string summary_value(const std::string& output, const std::string& label) {
    const auto pos = output.find(label + ": ");
    REQUIRE(pos != std::string::npos);
    const auto start = pos + label.size() + 2;
    const auto end = output.find('\n', start);
    return output.substr(start, end - start);
}

} // namespace

TEST_CASE("usage errors exit with code 1") {
    REQUIRE(run("bogus-subcommand").exit_code == 1);
    REQUIRE(run("estimate --no-such-flag").exit_code == 1);
    SECTION("missing data directory is a data error") {
        const auto r = run("estimate --data /nonexistent --lag 1 --out /tmp/x.json");
        REQUIRE(r.exit_code == 1);
    }
    SECTION("optimize-w with an indicator basis is rejected") {
        const auto dir = fresh_dir("combo");
        vamp::save_trajectories(dir, testsupport::simulate_chain(testsupport::two_state_chain(), 2, 50, 1));
        const auto r = run("estimate --data " + dir.string() +
                           " --basis indicator --m 2 --optimize-w --lag 1 --out /tmp/x.json");
        REQUIRE(r.exit_code == 1);
        REQUIRE(r.output.find("rbf") != std::string::npos);
    }
}

TEST_CASE("simulate lorenz writes a loadable csv directory") {
    const auto dir = fresh_dir("lorenz");
    const auto r = run("simulate --system lorenz --n-traj 3 --length 0.5 --seed 5 --out " +
                       dir.string());
    REQUIRE(r.exit_code == 0);
    const auto data = vamp::load_trajectories(dir);
    REQUIRE(data.size() == 3);
    REQUIRE(data.dim() == 3);
    REQUIRE(data.dt == 0.005);
    REQUIRE(data.trajectories[0].rows() == 100);

    SECTION("deterministic across invocations") {
        const auto dir2 = fresh_dir("lorenz2");
        run("simulate --system lorenz --n-traj 3 --length 0.5 --seed 5 --out " + dir2.string());
        const auto again = vamp::load_trajectories(dir2);
        for (std::size_t s = 0; s < 3; ++s) {
            REQUIRE((again.trajectories[s].array() == data.trajectories[s].array()).all());
        }
    }
    SECTION("eta variant emits six bounded observables") {
        const auto dir_eta = fresh_dir("lorenz_eta");
        REQUIRE(run("simulate --system lorenz-eta --n-traj 2 --length 0.25 --seed 5 --out " +
                    dir_eta.string())
                    .exit_code == 0);
        const auto eta = vamp::load_trajectories(dir_eta);
        REQUIRE(eta.dim() == 6);
        REQUIRE(eta.trajectories[0].cwiseAbs().maxCoeff() <= 1.5);
    }
}

TEST_CASE("estimate, score, and reload a model end to end") {
    const auto chain = testsupport::three_state_chain();
    const auto dir = fresh_dir("estimate");
    vamp::save_trajectories(dir, testsupport::simulate_chain(chain, 6, 400, 9));
    const auto model_file = fs::temp_directory_path() / "vamp_cli_model.json";

    const auto est = run("estimate --data " + dir.string() +
                         " --basis indicator --m 3 --domain 0:1 --lag 1 --k 3 --out " +
                         model_file.string());
    REQUIRE(est.exit_code == 0);

    SECTION("summary reports the constant first singular value") {
        const auto s_line = summary_value(est.output, "singular values");
        const double s1 = vamp::csv::parse_double(s_line.substr(0, s_line.find(' ')));
        REQUIRE(std::abs(s1 - 1.0) < 1e-8);
    }
    SECTION("model file reloads with the requested shape") {
        const auto model = vamp::load_model(model_file);
        REQUIRE(model.rank() == 3);
        REQUIRE(model.lag_steps == 1);
    }
    SECTION("score reproduces the training score printed by estimate") {
        const double estimate_vamp2 =
            vamp::csv::parse_double(summary_value(est.output, "training vamp-2 score"));
        const auto scored = run("score --model " + model_file.string() + " --data " +
                                dir.string() + " --score vampr --r 2");
        REQUIRE(scored.exit_code == 0);
        REQUIRE(scored.output.find("score_kind,r,k,value") != std::string::npos);
        const auto last_comma = scored.output.rfind(',');
        const double scored_value =
            vamp::csv::parse_double(scored.output.substr(last_comma + 1));
        REQUIRE(std::abs(scored_value - estimate_vamp2) < 1e-10);
    }
    SECTION("vamp-e equals vamp-2 on the training data through the CLI") {
        const auto e = run("score --model " + model_file.string() + " --data " + dir.string() +
                           " --score vampe");
        const auto r2 = run("score --model " + model_file.string() + " --data " + dir.string() +
                            " --score vampr --r 2");
        REQUIRE(e.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        const double ve = vamp::csv::parse_double(e.output.substr(e.output.rfind(',') + 1));
        const double v2 = vamp::csv::parse_double(r2.output.substr(r2.output.rfind(',') + 1));
        REQUIRE(std::abs(ve - v2) < 1e-8);
    }
}

TEST_CASE("rbf estimation with w search through the CLI") {
    const auto chain = testsupport::two_state_chain();
    const auto dir = fresh_dir("rbfw");
    vamp::save_trajectories(dir, testsupport::simulate_chain(chain, 5, 300, 21));
    const auto model_file = fs::temp_directory_path() / "vamp_cli_rbf.json";
    const auto r = run("estimate --data " + dir.string() +
                       " --basis rbf --m 4 --centers uniform --domain 0:1 --optimize-w "
                       "--lag 1 --out " + model_file.string());
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("w search:") != std::string::npos);
    const auto model = vamp::load_model(model_file);
    REQUIRE(model.basis0.w > 0.0);
}

TEST_CASE("numerical failures exit with code 2") {
    // Scoring with the subspace score on a test set that stays in one state
    // makes the projected covariance singular.
    const auto chain = testsupport::two_state_chain();
    const auto train_dir = fresh_dir("numfail_train");
    vamp::save_trajectories(train_dir, testsupport::simulate_chain(chain, 4, 200, 31));
    const auto model_file = fs::temp_directory_path() / "vamp_cli_numfail.json";
    REQUIRE(run("estimate --data " + train_dir.string() +
                " --basis indicator --m 2 --domain 0:1 --lag 1 --out " + model_file.string())
                .exit_code == 0);

    const auto test_dir = fresh_dir("numfail_test");
    vamp::TrajectoryCollection constant;
    constant.dt = 1.0;
    constant.trajectories.push_back(Eigen::MatrixXd::Constant(50, 1, 0.25));
    vamp::save_trajectories(test_dir, constant);

    const auto r = run("score --model " + model_file.string() + " --data " + test_dir.string() +
                       " --score subspace-vampr --r 2");
    REQUIRE(r.exit_code == 2);
}

TEST_CASE("cv subcommand emits the documented csv schema") {
    const auto chain = testsupport::three_state_chain();
    const auto dir = fresh_dir("cv");
    vamp::save_trajectories(dir, testsupport::simulate_chain(chain, 8, 150, 3));
    const auto report_file = fs::temp_directory_path() / "vamp_cli_cv.csv";

    const auto r = run("cv --data " + dir.string() +
                       " --basis indicator --m-grid 2 3 6 --domain 0:1 --lag 1 --folds 4 "
                       "--seed 7 --threads 2 --out " + report_file.string());
    REQUIRE(r.exit_code == 0);

    std::ifstream in(report_file);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "theta_id,basis,m,w,k,fold,train_score,test_score");
    int rows = 0;
    bool summary_seen = false;
    while (std::getline(in, line)) {
        if (line == "theta_id,mcv,selected") {
            summary_seen = true;
            REQUIRE(rows == 3 * 4);
        }
        if (!summary_seen) ++rows;
    }
    REQUIRE(summary_seen);

    SECTION("deterministic given the seed") {
        const auto report2 = fs::temp_directory_path() / "vamp_cli_cv2.csv";
        REQUIRE(run("cv --data " + dir.string() +
                    " --basis indicator --m-grid 2 3 6 --domain 0:1 --lag 1 --folds 4 "
                    "--seed 7 --threads 1 --out " + report2.string())
                    .exit_code == 0);
        std::ifstream a(report_file);
        std::ifstream b(report2);
        std::stringstream sa;
        std::stringstream sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        REQUIRE(sa.str() == sb.str());
    }
}
