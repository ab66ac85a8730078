#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/inverse.hpp"
#include "eitc/mesh.hpp"
#include "eitc/phantoms.hpp"
#include "eitc/rng.hpp"
#include "eitc/vecmat.hpp"

#include <cmath>

using namespace eitc;

namespace {
struct Fixture {
    TriMesh mesh = build_disk_mesh(32, 5);
    SensitivityMatrix J;
    Eigen::MatrixXd background;
    Fixture() {
        J = sensitivity(mesh);
        background = dtn_matrix(mesh, {Eigen::VectorXd::Ones(mesh.n_triangles())}).values;
    }
};
Fixture& fixture() {
    static Fixture f;
    return f;
}
} // namespace

TEST_CASE("sensitivity symmetry in the boundary index pair") {
    auto& f = fixture();
    const int nb = 32;
    for (int e = 0; e < f.mesh.n_triangles(); e += 13)
        for (int i = 0; i < nb; i += 5)
            for (int j = 0; j < nb; j += 7)
                CHECK(f.J.j(i * nb + j, e) == doctest::Approx(f.J.j(j * nb + i, e)).epsilon(1e-12));
}

TEST_CASE("row sums reproduce the background DtN (homogeneity in gamma)") {
    auto& f = fixture();
    const Eigen::VectorXd row_sums = f.J.j.rowwise().sum();
    const Eigen::VectorXd lam1 = vec_rowmajor(f.background);
    CHECK((row_sums - lam1).lpNorm<Eigen::Infinity>() <
          1e-8 * f.background.cwiseAbs().maxCoeff());
}

TEST_CASE("finite-difference check of one element derivative") {
    auto& f = fixture();
    const int e = f.mesh.n_triangles() / 3;
    const double h = 1e-4;
    ConductivityField bumped{Eigen::VectorXd::Ones(f.mesh.n_triangles())};
    bumped.values[e] += h;
    const Eigen::MatrixXd lam_bumped = dtn_matrix(f.mesh, bumped).values;
    const Eigen::VectorXd fd = vec_rowmajor((lam_bumped - f.background) / h);
    const Eigen::VectorXd pred = f.J.j.col(e);
    CHECK((fd - pred).norm() / pred.norm() < 0.01);
}

TEST_CASE("zero data residual reconstructs the background") {
    auto& f = fixture();
    const ConductivityField gamma = reconstruct(f.background, f.background, f.J);
    CHECK((gamma.values.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("weak single inclusion localizes at the right spot") {
    auto& f = fixture();
    DiskPhantomSpec spec;
    spec.centers = {{0.0, 0.0}};
    spec.radii = {0.2};
    spec.contrasts = {1.5};
    const Eigen::MatrixXd lam = dtn_matrix(f.mesh, to_conductivity(spec, f.mesh)).values;
    const ConductivityField rec = reconstruct(lam, f.background, f.J);
    int argmax = 0;
    rec.values.maxCoeff(&argmax);
    const Vec2 c = f.mesh.centroid(argmax);
    CHECK(std::hypot(c.x, c.y) <= 0.2 + 1e-9);
}

TEST_CASE("pre-clip reconstruction is linear in the data residual") {
    auto& f = fixture();
    const auto spec = sample_disks(split_seed(3, "inv"), 2);
    const Eigen::MatrixXd lam = dtn_matrix(f.mesh, to_conductivity(spec, f.mesh)).values;
    const Eigen::MatrixXd D = lam - f.background;
    const double lambda_reg = 1e-3 * sensitivity_norm_sq(f.J);
    const Eigen::VectorXd base =
        reconstruct_perturbation(f.background + D, f.background, f.J, lambda_reg);
    for (double a : {0.5, 2.0}) {
        const Eigen::VectorXd scaled =
            reconstruct_perturbation(f.background + a * D, f.background, f.J, lambda_reg);
        CHECK((scaled - a * base).norm() < 1e-9 * std::max(1.0, base.norm()));
    }
}

TEST_CASE("heavier regularization shrinks the perturbation") {
    auto& f = fixture();
    const auto spec = sample_disks(split_seed(4, "inv"), 3);
    const Eigen::MatrixXd lam = dtn_matrix(f.mesh, to_conductivity(spec, f.mesh)).values;
    const double l0 = 1e-4 * sensitivity_norm_sq(f.J);
    double prev = reconstruct_perturbation(lam, f.background, f.J, l0).norm();
    for (double mult : {10.0, 100.0}) {
        const double cur = reconstruct_perturbation(lam, f.background, f.J, l0 * mult).norm();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK_THROWS_AS(reconstruct_perturbation(lam, f.background, f.J, 0.0), std::invalid_argument);
}

TEST_CASE("conductivity floor clipping") {
    auto& f = fixture();
    // A large negative residual drives the linear estimate below the floor.
    const Eigen::MatrixXd lam = 0.2 * f.background;
    ReconstructOptions opts;
    opts.clip_floor = 0.1;
    const ConductivityField rec = reconstruct(lam, f.background, f.J, opts);
    CHECK(rec.values.minCoeff() >= 0.1);
}
