#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vamp {

/// Ordered real-valued state sequences with a uniform sampling interval.
/// Rows are time steps, columns are state dimensions. Immutable after load;
/// all read operations are safe for concurrent use.
struct TrajectoryCollection {
    std::vector<Eigen::MatrixXd> trajectories;
    double dt = 1.0;
    std::vector<std::string> labels;

    Eigen::Index dim() const { return trajectories.empty() ? 0 : trajectories.front().cols(); }
    std::size_t size() const { return trajectories.size(); }

    /// Total number of samples over all trajectories.
    std::int64_t total_steps() const;

    /// Throws data_error if any invariant is violated (consistent dimension,
    /// length >= 2, dt > 0, finite dt).
    void validate() const;
};

/// Partition of the usable time steps into contiguous blocks, each block
/// assigned to one of J folds.
struct FoldAssignment {
    struct Block {
        std::size_t trajectory = 0;
        Eigen::Index start = 0; // inclusive
        Eigen::Index end = 0;   // exclusive
        Eigen::Index length() const { return end - start; }
    };

    std::vector<Block> blocks;
    std::vector<int> fold_of_block; // block index -> fold in [0, folds)
    int folds = 0;
    Eigen::Index block_length = 0;
};

/// Load one trajectory per `*.csv` file in `dir`, sorted lexicographically
/// by filename. The sampling interval comes from `dt_override` when given,
/// otherwise from the `dt=` line of `dir/meta.txt`.
TrajectoryCollection load_trajectories(const std::filesystem::path& dir,
                                       std::optional<double> dt_override = std::nullopt);

/// Write trajectories as `traj_NNNN.csv` (or the stored labels) plus
/// meta.txt. Values round-trip bit-exactly through load_trajectories.
void save_trajectories(const std::filesystem::path& dir, const TrajectoryCollection& c);

/// Number of lagged pairs (x_t, x_{t+tau}): sum over trajectories of
/// max(0, T_s - tau_steps). Trajectories shorter than the lag contribute 0.
std::int64_t lagged_pair_count(const TrajectoryCollection& c, Eigen::Index tau_steps);

/// Cut each trajectory into blocks of length L (a trailing partial block of
/// length >= 2 is kept) and deal the blocks into J folds: seeded uniform
/// shuffle, then round-robin. Fold sizes differ by at most one block.
FoldAssignment split_folds(const TrajectoryCollection& c, int folds, Eigen::Index block_length,
                           std::uint64_t seed);

/// Collection of the blocks assigned to fold j (the test set D_j).
TrajectoryCollection fold_subset(const TrajectoryCollection& c, const FoldAssignment& f, int fold);

/// Collection of all blocks outside fold j (the training set D \ D_j).
TrajectoryCollection fold_complement(const TrajectoryCollection& c, const FoldAssignment& f,
                                     int fold);

} // namespace vamp
