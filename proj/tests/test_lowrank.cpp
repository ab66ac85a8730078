#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/lowrank.hpp"
#include "eitc/measurements.hpp"
#include "eitc/rng.hpp"

using namespace eitc;

TEST_CASE("partition block counts and tiling") {
    const HierarchicalPartition p3 = partition(128, 3);
    CHECK(p3.diagonal.size() == 8);
    CHECK(p3.offdiagonal.size() == 14);
    for (const auto& b : p3.diagonal) CHECK(b.rows == 16);

    const HierarchicalPartition p1 = partition(128, 1);
    CHECK(p1.diagonal.size() == 2);
    CHECK(p1.offdiagonal.size() == 2);
    CHECK(p1.diagonal[0].rows == 64);

    for (int level : {1, 2, 3}) {
        const HierarchicalPartition p = partition(64, level);
        Eigen::MatrixXd cover = Eigen::MatrixXd::Zero(64, 64);
        for (const auto& b : p.diagonal) cover.block(b.row0, b.col0, b.rows, b.cols).array() += 1.0;
        for (const auto& b : p.offdiagonal)
            cover.block(b.row0, b.col0, b.rows, b.cols).array() += 1.0;
        CHECK(cover.minCoeff() == 1.0);
        CHECK(cover.maxCoeff() == 1.0);
    }
    CHECK_THROWS_AS(partition(36, 3), std::invalid_argument);
}

namespace {
Eigen::MatrixXd rank_one(int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = rng.normal();
        v[i] = rng.normal();
    }
    return u * v.transpose();
}
} // namespace

TEST_CASE("rank-1 recovery at moderate rate, failure at 1%") {
    const Eigen::MatrixXd A = rank_one(64, 5);
    const Mask dense = mask_random(64, 0.30, 11);
    const BlockResult good = complete_block(apply_mask(A, dense), dense.m);
    CHECK(good.converged);
    CHECK((good.completed - A).norm() / A.norm() < 1e-3);

    const Mask sparse = mask_random(64, 0.01, 11);
    const BlockResult bad = complete_block(apply_mask(A, sparse), sparse.m);
    CHECK((bad.completed - A).norm() / A.norm() > 0.3);
}

TEST_CASE("fully observed block is returned verbatim") {
    const Eigen::MatrixXd A = rank_one(16, 9);
    const Mask ones = mask_random(16, 1.0, 1);
    const BlockResult res = complete_block(A, ones.m);
    CHECK((res.completed - A).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("observed entries are reproduced exactly after exit projection") {
    const Eigen::MatrixXd A = rank_one(32, 13) + 0.1 * rank_one(32, 14);
    const Mask m = mask_random(32, 0.4, 21);
    const BlockResult res = complete_block(apply_mask(A, m), m.m);
    CHECK((apply_mask(res.completed, m) - apply_mask(A, m)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("completion does not exceed the nuclear norm of the truth") {
    // The ground truth is feasible, so the minimizer's nuclear norm must not
    // exceed it (up to solver slack).
    const Eigen::MatrixXd A = rank_one(48, 31) + rank_one(48, 32);
    const Mask m = mask_random(48, 0.5, 41);
    const BlockResult res = complete_block(apply_mask(A, m), m.m);
    CHECK(nuclear_norm(res.completed) <= nuclear_norm(A) * (1.0 + 1e-3) + 1e-6);
}

TEST_CASE("hierarchical completion: identity on full observation, symmetry") {
    Rng rng(77);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(32, 32);
    for (int r = 0; r < 3; ++r) A += rank_one(32, 100 + r);
    A = 0.5 * (A + A.transpose()).eval();

    const Mask full = mask_hierarchical(32, 2, 1.0, 3);
    const HierarchicalResult res = complete_hierarchical(A, full, 2);
    CHECK(res.all_converged);
    CHECK((res.completed - A).cwiseAbs().maxCoeff() < 1e-12);

    // Symmetric input + symmetric mask: output symmetrized.
    Mask hier = mask_hierarchical(32, 2, 0.5, 9);
    hier.m = hier.m.cwiseMax(hier.m.transpose().eval()); // symmetrize pattern
    const HierarchicalResult res2 = complete_hierarchical(apply_mask(A, hier), hier, 2);
    CHECK((res2.completed - res2.completed.transpose()).norm() / res2.completed.norm() < 1e-6);

    const Mask wrong_kind = mask_random(32, 0.5, 3);
    CHECK_THROWS_AS(complete_hierarchical(A, wrong_kind, 2), std::invalid_argument);
}

TEST_CASE("blockwise baseline under a non-hierarchical mask returns near zero-fill") {
    // A principal mask leaves most blocks empty; the per-block nuclear norm
    // minimizer then stays at zero and the result is no better than the
    // masked input.
    Eigen::MatrixXd A = rank_one(32, 55);
    A.array() += 1.0;
    const Mask m = mask_principal(32, 0.01, 17);
    const HierarchicalResult res = complete_blockwise(apply_mask(A, m), m.m, 3);
    const double re = (res.completed - A).norm() / A.norm();
    CHECK(re > 0.5);
}

TEST_CASE("serial and parallel block completion agree bitwise") {
    Eigen::MatrixXd A = rank_one(32, 61) + rank_one(32, 62);
    A = 0.5 * (A + A.transpose()).eval();
    Mask hier = mask_hierarchical(32, 2, 0.4, 19);
    const Eigen::MatrixXd observed = apply_mask(A, hier);
    const HierarchicalResult par = complete_hierarchical(observed, hier, 2, {}, true);
    const HierarchicalResult ser = complete_hierarchical(observed, hier, 2, {}, false);
    CHECK((par.completed - ser.completed).cwiseAbs().maxCoeff() == 0.0);
}
