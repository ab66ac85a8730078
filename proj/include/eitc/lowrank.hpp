// Hierarchical matrix-completion baseline: dyadic partition of the
// measurement table and per-block constrained nuclear-norm minimization.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace eitc {

struct Mask; // measurements.hpp

struct BlockRange {
    int row0 = 0, col0 = 0, rows = 0, cols = 0;
    int level = 0; // 1..level for off-diagonal blocks, `level` for diagonal
};

/// Dyadic partition with 2^level diagonal blocks and 2 + 4 + ... + 2^level
/// off-diagonal blocks tiling the matrix exactly once.
struct HierarchicalPartition {
    int n = 0;
    int level = 0;
    std::vector<BlockRange> diagonal;
    std::vector<BlockRange> offdiagonal;
};

HierarchicalPartition partition(int n, int level);

struct CompletionOptions {
    double tolerance = 1e-6;
    int max_iters = 5000;
};

struct BlockResult {
    Eigen::MatrixXd completed;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0; // pre-projection constraint residual, relative
};

/// min ||X||_* subject to M.*X = M.*observed, solved by singular-value
/// thresholding with continuation; observed entries are restored exactly by a
/// projection at exit.
BlockResult complete_block(const Eigen::MatrixXd& observed_block,
                           const Eigen::MatrixXd& block_mask,
                           const CompletionOptions& opts = {});

struct HierarchicalResult {
    Eigen::MatrixXd completed;
    bool all_converged = false;
    std::vector<BlockResult> blocks; // off-diagonal blocks, partition order
};

/// Hierarchical completion: diagonal blocks copied verbatim (the hierarchical
/// mask observes them fully), off-diagonal blocks completed independently.
/// When the input and mask are symmetric the output is symmetrized.
HierarchicalResult complete_hierarchical(const Eigen::MatrixXd& observed, const Mask& mask,
                                         int level, const CompletionOptions& opts = {},
                                         bool parallel = true);

/// Same per-block machinery applied to an arbitrary observation pattern:
/// every block (diagonal included) that is not fully observed goes through
/// the nuclear-norm solver. Used to run the baseline under non-hierarchical
/// masks for method comparisons.
HierarchicalResult complete_blockwise(const Eigen::MatrixXd& observed,
                                      const Eigen::MatrixXd& mask_bits, int level,
                                      const CompletionOptions& opts = {}, bool parallel = true);

double nuclear_norm(const Eigen::MatrixXd& x);

} // namespace eitc
