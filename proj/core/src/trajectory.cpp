#include "vamp/trajectory.hpp"

#include "vamp/csv.hpp"
#include "vamp/errors.hpp"
#include "vamp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vamp {

std::int64_t TrajectoryCollection::total_steps() const {
    std::int64_t total = 0;
    for (const auto& t : trajectories) total += t.rows();
    return total;
}

void TrajectoryCollection::validate() const {
    if (trajectories.empty()) throw data_error("collection has no trajectories");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw data_error("dt must be positive and finite");
    const Eigen::Index d = trajectories.front().cols();
    if (d < 1) throw data_error("state dimension must be >= 1");
    for (std::size_t s = 0; s < trajectories.size(); ++s) {
        if (trajectories[s].cols() != d) {
            throw data_error("inconsistent dimension: trajectory " + std::to_string(s) + " has " +
                             std::to_string(trajectories[s].cols()) + " columns, expected " +
                             std::to_string(d));
        }
        if (trajectories[s].rows() < 2) {
            throw data_error("trajectory " + std::to_string(s) + " has fewer than 2 steps");
        }
    }
}

TrajectoryCollection load_trajectories(const std::filesystem::path& dir,
                                       std::optional<double> dt_override) {
    if (!std::filesystem::is_directory(dir)) {
        throw data_error("missing path or not a directory: " + dir.string());
    }

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    if (files.empty()) throw data_error("no .csv files in " + dir.string());

    TrajectoryCollection c;
    for (const auto& file : files) {
        c.trajectories.push_back(csv::read_matrix(file));
        c.labels.push_back(file.stem().string());
    }

    if (dt_override) {
        c.dt = *dt_override;
    } else {
        const auto meta = dir / "meta.txt";
        if (!std::filesystem::exists(meta)) {
            throw data_error("no dt given: pass one explicitly or provide " + meta.string());
        }
        const auto entries = csv::read_key_values(meta);
        const auto it = entries.find("dt");
        if (it == entries.end()) throw data_error(meta.string() + " has no dt= line");
        c.dt = csv::parse_double(it->second);
    }

    c.validate();
    return c;
}

void save_trajectories(const std::filesystem::path& dir, const TrajectoryCollection& c) {
    c.validate();
    std::filesystem::create_directories(dir);
    for (std::size_t s = 0; s < c.trajectories.size(); ++s) {
        std::string name;
        if (s < c.labels.size() && !c.labels[s].empty()) {
            name = c.labels[s] + ".csv";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "traj_%04zu.csv", s);
            name = buf;
        }
        csv::write_matrix(dir / name, c.trajectories[s]);
    }
    csv::write_key_values(dir / "meta.txt", {{"dt", csv::format_double(c.dt)}});
}

std::int64_t lagged_pair_count(const TrajectoryCollection& c, Eigen::Index tau_steps) {
    if (tau_steps < 1) throw data_error("tau_steps must be >= 1");
    std::int64_t pairs = 0;
    for (const auto& t : c.trajectories) pairs += std::max<std::int64_t>(0, t.rows() - tau_steps);
    return pairs;
}

FoldAssignment split_folds(const TrajectoryCollection& c, int folds, Eigen::Index block_length,
                           std::uint64_t seed) {
    c.validate();
    if (folds < 2) throw data_error("fold count must be >= 2");
    if (block_length < 2) throw data_error("block length must be >= 2");

    FoldAssignment f;
    f.folds = folds;
    f.block_length = block_length;
    for (std::size_t s = 0; s < c.trajectories.size(); ++s) {
        const Eigen::Index steps = c.trajectories[s].rows();
        for (Eigen::Index start = 0; start < steps; start += block_length) {
            const Eigen::Index end = std::min(start + block_length, steps);
            // A trailing remnant of a single step can never hold a lagged
            // pair; longer partial blocks are kept.
            if (end - start >= 2) f.blocks.push_back({s, start, end});
        }
    }
    if (static_cast<int>(f.blocks.size()) < folds) {
        throw data_error("too few blocks (" + std::to_string(f.blocks.size()) + ") for " +
                         std::to_string(folds) + " folds");
    }

    std::vector<std::size_t> order(f.blocks.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed, /*stream=*/0x666f6c64); // "fold"
    rng.shuffle(order);

    f.fold_of_block.assign(f.blocks.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        f.fold_of_block[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return f;
}

namespace {

TrajectoryCollection select_blocks(const TrajectoryCollection& c, const FoldAssignment& f,
                                   int fold, bool complement) {
    if (fold < 0 || fold >= f.folds) throw data_error("fold index out of range");
    TrajectoryCollection out;
    out.dt = c.dt;
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        const bool in_fold = f.fold_of_block[b] == fold;
        if (in_fold == complement) continue;
        const auto& blk = f.blocks[b];
        out.trajectories.push_back(
            c.trajectories[blk.trajectory].middleRows(blk.start, blk.length()));
        out.labels.push_back("block_" + std::to_string(b));
    }
    if (out.trajectories.empty()) throw data_error("fold selection is empty");
    return out;
}

} // namespace

TrajectoryCollection fold_subset(const TrajectoryCollection& c, const FoldAssignment& f, int fold) {
    return select_blocks(c, f, fold, /*complement=*/false);
}

TrajectoryCollection fold_complement(const TrajectoryCollection& c, const FoldAssignment& f,
                                     int fold) {
    return select_blocks(c, f, fold, /*complement=*/true);
}

} // namespace vamp
