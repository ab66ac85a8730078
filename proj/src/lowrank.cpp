#include "eitc/lowrank.hpp"

#include "eitc/measurements.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace eitc {

HierarchicalPartition partition(int n, int level) {
    if (level < 1) throw std::invalid_argument("partition: level must be >= 1");
    if (n % (1 << level) != 0)
        throw std::invalid_argument("partition: N_B must be divisible by 2^level");
    HierarchicalPartition part;
    part.n = n;
    part.level = level;
    // Recursive dyadic split: the two off-diagonal quadrants become blocks,
    // the two diagonal quadrants are split further.
    struct Frame {
        int r0, c0, size, depth;
    };
    std::vector<Frame> stack{{0, 0, n, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.depth == level) {
            part.diagonal.push_back({f.r0, f.c0, f.size, f.size, level});
            continue;
        }
        const int h = f.size / 2;
        part.offdiagonal.push_back({f.r0, f.c0 + h, h, h, f.depth + 1});
        part.offdiagonal.push_back({f.r0 + h, f.c0, h, h, f.depth + 1});
        stack.push_back({f.r0 + h, f.c0 + h, h, f.depth + 1});
        stack.push_back({f.r0, f.c0, h, f.depth + 1});
    }
    return part;
}

double nuclear_norm(const Eigen::MatrixXd& x) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(x).singularValues().sum();
}

namespace {

// Soft-threshold the singular values.
Eigen::MatrixXd svt(const Eigen::MatrixXd& x, double tau) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i) {
        s[i] = std::max(0.0, s[i] - tau);
        if (s[i] > 0.0) rank = i + 1;
    }
    if (rank == 0) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
    return svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal() *
           svd.matrixV().leftCols(rank).transpose();
}

} // namespace

BlockResult complete_block(const Eigen::MatrixXd& observed_block,
                           const Eigen::MatrixXd& block_mask, const CompletionOptions& opts) {
    if (observed_block.rows() != block_mask.rows() || observed_block.cols() != block_mask.cols())
        throw std::invalid_argument("complete_block: shape mismatch");

    BlockResult res;
    const Eigen::MatrixXd data = observed_block.cwiseProduct(block_mask);
    const double data_norm = data.norm();
    if (data_norm == 0.0) {
        // Nothing observed (or all zeros): the zero matrix is the minimizer.
        res.completed = Eigen::MatrixXd::Zero(observed_block.rows(), observed_block.cols());
        res.converged = true;
        return res;
    }

    // Accelerated proximal gradient on tau*||X||_* + 1/2 ||M.*(X - data)||^2
    // with continuation in tau; the path reaches the constrained minimizer as
    // tau shrinks, and the final projection restores observed entries exactly.
    const double sigma1 = Eigen::BDCSVD<Eigen::MatrixXd>(data).singularValues()[0];
    double tau = 0.25 * sigma1;
    const double tau_floor = 1e-4 * opts.tolerance * sigma1;

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(data.rows(), data.cols());
    Eigen::MatrixXd Y = X;
    double theta = 1.0;
    int it = 0;
    bool converged = false;
    while (it < opts.max_iters) {
        const Eigen::MatrixXd grad = (Y - data).cwiseProduct(block_mask);
        const Eigen::MatrixXd X_new = svt(Y - grad, tau);
        const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        Y = X_new + ((theta - 1.0) / theta_new) * (X_new - X);
        const double change = (X_new - X).norm() / std::max(1.0, X_new.norm());
        X = X_new;
        theta = theta_new;
        ++it;

        if (change <= 1e-6) {
            res.residual = (X - data).cwiseProduct(block_mask).norm() / data_norm;
            if (res.residual <= opts.tolerance) {
                converged = true;
                break;
            }
            if (tau <= tau_floor) break;
            tau = std::max(tau_floor, tau * 0.25);
            theta = 1.0;
            Y = X;
        }
    }
    res.residual = (X - data).cwiseProduct(block_mask).norm() / data_norm;
    res.converged = converged || res.residual <= opts.tolerance;
    res.iterations = it;
    // Exit projection onto the constraint set.
    res.completed = X + (data - X).cwiseProduct(block_mask);
    return res;
}

namespace {

HierarchicalResult run_blocks(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& bits,
                              int level, const CompletionOptions& opts, bool parallel,
                              bool diagonal_verbatim) {
    const int n = int(observed.rows());
    const HierarchicalPartition part = partition(n, level);
    HierarchicalResult res;
    res.completed = Eigen::MatrixXd::Zero(n, n);

    std::vector<BlockRange> work; // blocks that go through the solver
    for (const auto& b : part.diagonal) {
        const Eigen::MatrixXd sub_mask = bits.block(b.row0, b.col0, b.rows, b.cols);
        if (diagonal_verbatim || sub_mask.sum() == double(b.rows) * b.cols)
            res.completed.block(b.row0, b.col0, b.rows, b.cols) =
                observed.block(b.row0, b.col0, b.rows, b.cols);
        else
            work.push_back(b);
    }
    for (const auto& b : part.offdiagonal) work.push_back(b);

    res.blocks.resize(work.size());
    const int nw = int(work.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int w = 0; w < nw; ++w) {
        const auto& b = work[w];
        res.blocks[w] = complete_block(observed.block(b.row0, b.col0, b.rows, b.cols),
                                       bits.block(b.row0, b.col0, b.rows, b.cols), opts);
    }
    res.all_converged = true;
    for (int w = 0; w < nw; ++w) {
        const auto& b = work[w];
        res.completed.block(b.row0, b.col0, b.rows, b.cols) = res.blocks[w].completed;
        res.all_converged = res.all_converged && res.blocks[w].converged;
    }

    // The measurement table is symmetric; restore symmetry when the inputs
    // allow it (the per-block solves do not enforce it).
    const bool sym_mask = (bits - bits.transpose()).cwiseAbs().maxCoeff() == 0.0;
    const bool sym_obs =
        (observed - observed.transpose()).norm() <= 1e-10 * std::max(1.0, observed.norm());
    if (sym_mask && sym_obs)
        res.completed = 0.5 * (res.completed + res.completed.transpose()).eval();
    return res;
}

} // namespace

HierarchicalResult complete_hierarchical(const Eigen::MatrixXd& observed, const Mask& mask,
                                         int level, const CompletionOptions& opts, bool parallel) {
    if (mask.kind != MaskKind::Hierarchical)
        throw std::invalid_argument("complete_hierarchical: mask kind must be hierarchical");
    if (mask.level != level)
        throw std::invalid_argument("complete_hierarchical: mask level mismatch");
    if (observed.rows() != mask.m.rows() || observed.cols() != mask.m.cols())
        throw std::invalid_argument("complete_hierarchical: shape mismatch");
    return run_blocks(observed, mask.m, level, opts, parallel, /*diagonal_verbatim=*/true);
}

HierarchicalResult complete_blockwise(const Eigen::MatrixXd& observed,
                                      const Eigen::MatrixXd& mask_bits, int level,
                                      const CompletionOptions& opts, bool parallel) {
    if (observed.rows() != mask_bits.rows() || observed.cols() != mask_bits.cols())
        throw std::invalid_argument("complete_blockwise: shape mismatch");
    return run_blocks(observed, mask_bits, level, opts, parallel, /*diagonal_verbatim=*/false);
}

} // namespace eitc
