// Serial-reference versus OpenMP timings for the hot kernels: denoiser
// convolutions, multi-column interior solves behind the DtN assembly, and
// per-block nuclear-norm completion.
#include "eitc/fem.hpp"
#include "eitc/kernels.hpp"
#include "eitc/lowrank.hpp"
#include "eitc/measurements.hpp"
#include "eitc/mesh.hpp"
#include "eitc/rng.hpp"

#include <benchmark/benchmark.h>

using namespace eitc;

namespace {

void fill_random(std::vector<double>& v, Rng& rng) {
    for (double& x : v) x = rng.normal();
}

void bm_conv3x3(benchmark::State& state, bool parallel) {
    const int c_in = 16, c_out = 32, hw = 32;
    Rng rng(1);
    Tensor x(c_in, hw, hw), y;
    fill_random(x.v, rng);
    std::vector<double> W(size_t(c_out) * c_in * 9), b(c_out);
    fill_random(W, rng);
    fill_random(b, rng);
    for (auto _ : state) {
        conv3x3_forward(x, W.data(), b.data(), c_out, y, parallel);
        benchmark::DoNotOptimize(y.v.data());
        benchmark::ClobberMemory();
    }
}

void bm_conv3x3_backward(benchmark::State& state, bool parallel) {
    const int c_in = 16, c_out = 32, hw = 32;
    Rng rng(1);
    Tensor x(c_in, hw, hw), dy(c_out, hw, hw), dx;
    fill_random(x.v, rng);
    fill_random(dy.v, rng);
    std::vector<double> W(size_t(c_out) * c_in * 9), dW(W.size()), db(c_out);
    fill_random(W, rng);
    for (auto _ : state) {
        conv3x3_backward(x, W.data(), c_out, dy, &dx, dW.data(), db.data(), parallel);
        benchmark::DoNotOptimize(dx.v.data());
        benchmark::ClobberMemory();
    }
}

void bm_dtn_columns(benchmark::State& state, bool parallel) {
    const TriMesh mesh = build_disk_mesh(64, 11);
    const ConductivityField gamma{Eigen::VectorXd::Ones(mesh.n_triangles())};
    const StiffnessMatrix K = assemble_stiffness(mesh, gamma);
    const InteriorFactorization fact(mesh, K);
    const Eigen::MatrixXd rhs = Eigen::MatrixXd(K.k_ib);
    for (auto _ : state) {
        Eigen::MatrixXd X = interior_solve_block(fact, rhs, parallel);
        benchmark::DoNotOptimize(X.data());
    }
}

void bm_block_completion(benchmark::State& state, bool parallel) {
    Rng rng(3);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(64, 64);
    for (int r = 0; r < 4; ++r) {
        Eigen::VectorXd u(64), v(64);
        for (int i = 0; i < 64; ++i) {
            u[i] = rng.normal();
            v[i] = rng.normal();
        }
        A += u * v.transpose();
    }
    A = 0.5 * (A + A.transpose()).eval();
    const Mask mask = mask_hierarchical(64, 2, 0.4, 7);
    const Eigen::MatrixXd observed = apply_mask(A, mask);
    CompletionOptions opts;
    opts.max_iters = 600;
    for (auto _ : state) {
        HierarchicalResult res = complete_hierarchical(observed, mask, 2, opts, parallel);
        benchmark::DoNotOptimize(res.completed.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(bm_conv3x3, serial, false);
BENCHMARK_CAPTURE(bm_conv3x3, openmp, true);
BENCHMARK_CAPTURE(bm_conv3x3_backward, serial, false);
BENCHMARK_CAPTURE(bm_conv3x3_backward, openmp, true);
BENCHMARK_CAPTURE(bm_dtn_columns, serial, false);
BENCHMARK_CAPTURE(bm_dtn_columns, openmp, true);
BENCHMARK_CAPTURE(bm_block_completion, serial, false);
BENCHMARK_CAPTURE(bm_block_completion, openmp, true);

BENCHMARK_MAIN();
