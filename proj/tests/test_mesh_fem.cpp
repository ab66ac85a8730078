#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/fem.hpp"
#include "eitc/mesh.hpp"
#include "eitc/phantoms.hpp"
#include "eitc/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace eitc;

namespace {
ConductivityField unit_field(const TriMesh& mesh) {
    return {Eigen::VectorXd::Ones(mesh.n_triangles())};
}
} // namespace

TEST_CASE("minimal admissible mesh") {
    const TriMesh mesh = build_disk_mesh(8, 2);
    CHECK(mesh.n_boundary() == 8);
    CHECK(mesh.n_interior() >= 1);
    for (int t = 0; t < mesh.n_triangles(); ++t) CHECK(mesh.signed_area(t) > 0.0);
    CHECK(mesh.validate().empty());
}

TEST_CASE("rejects degenerate boundary cycle") {
    CHECK_THROWS_AS(build_disk_mesh(7, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(32, 1), std::invalid_argument);
}

TEST_CASE("boundary nodes at canonical angles on the unit circle") {
    const TriMesh mesh = build_disk_mesh(32, 5);
    for (int k = 0; k < 32; ++k) {
        const Vec2& v = mesh.vertices[mesh.boundary_idx[k]];
        CHECK(std::abs(std::hypot(v.x, v.y) - 1.0) <= 1e-12);
        const double theta = 2.0 * M_PI * k / 32;
        CHECK(v.x == doctest::Approx(std::cos(theta)).epsilon(1e-12));
        CHECK(v.y == doctest::Approx(std::sin(theta)).epsilon(1e-12));
    }
}

TEST_CASE("total area equals the inscribed polygon") {
    const TriMesh mesh = build_disk_mesh(32, 5);
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) area += mesh.signed_area(t);
    const double polygon = 32.0 / 2.0 * std::sin(2.0 * M_PI / 32.0);
    CHECK(std::abs(area - polygon) < 1e-12);
}

TEST_CASE("reference resolution class at N_B=128") {
    const TriMesh mesh = build_disk_mesh(128, 22);
    CHECK(std::abs(mesh.n_interior() - 1324) < 0.05 * 1324);
    CHECK(std::abs(mesh.n_triangles() - 2774) < 0.05 * 2774);
}

TEST_CASE("mesh serialization round-trips") {
    const TriMesh mesh = build_disk_mesh(16, 3);
    const std::string path = (std::filesystem::temp_directory_path() / "eitc_mesh_rt.bin").string();
    save_mesh(mesh, path);
    const TriMesh back = load_mesh(path);
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_triangles() == mesh.n_triangles());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        CHECK(back.vertices[v].x == mesh.vertices[v].x);
        CHECK(back.vertices[v].y == mesh.vertices[v].y);
    }
    CHECK(back.boundary_idx == mesh.boundary_idx);
    CHECK(back.interior_idx == mesh.interior_idx);
    std::remove(path.c_str());
}

TEST_CASE("reference-triangle element stiffness") {
    const Eigen::Matrix3d K = element_stiffness({0, 0}, {1, 0}, {0, 1});
    Eigen::Matrix3d expected;
    expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
    CHECK((K - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stiffness kernel and bilinearity") {
    const TriMesh mesh = build_disk_mesh(16, 3);
    const StiffnessMatrix K = assemble_stiffness(mesh, unit_field(mesh));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    CHECK((K.full * ones).lpNorm<Eigen::Infinity>() < 1e-13);

    ConductivityField scaled = unit_field(mesh);
    scaled.values *= 3.7;
    const StiffnessMatrix K2 = assemble_stiffness(mesh, scaled);
    const Eigen::MatrixXd diff = Eigen::MatrixXd(K2.full) - 3.7 * Eigen::MatrixXd(K.full);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stiffness rejects bad conductivities") {
    const TriMesh mesh = build_disk_mesh(16, 3);
    ConductivityField gamma = unit_field(mesh);
    gamma.values[3] = -1.0;
    CHECK_THROWS_AS(assemble_stiffness(mesh, gamma), std::invalid_argument);
    gamma.values[3] = 0.0;
    CHECK_THROWS_AS(assemble_stiffness(mesh, gamma), std::invalid_argument);
    ConductivityField short_gamma{Eigen::VectorXd::Ones(3)};
    CHECK_THROWS_AS(assemble_stiffness(mesh, short_gamma), std::invalid_argument);
}

TEST_CASE("DtN symmetry and kernel") {
    const TriMesh mesh = build_disk_mesh(32, 5);
    for (std::uint64_t seed : {11u, 22u}) {
        const auto spec = sample_disks(split_seed(seed, "phantom"), 3);
        const DtNMatrix dtn = dtn_matrix(mesh, to_conductivity(spec, mesh));
        const Eigen::MatrixXd& L = dtn.values;
        CHECK((L - L.transpose()).norm() / L.norm() < 1e-10);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(32);
        CHECK((L * ones).lpNorm<Eigen::Infinity>() / L.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("background DtN matches the |k| law on Fourier modes") {
    const TriMesh mesh = build_disk_mesh(64, 11);
    const DtNMatrix dtn = dtn_matrix(mesh, unit_field(mesh));
    const Eigen::VectorXd rq = dtn_fourier_rayleigh(mesh, dtn.values, 64 / 8);
    for (int k = 1; k <= 64 / 8; ++k) CHECK(std::abs(rq[k - 1] - k) / k < 0.05);
}

TEST_CASE("quadratic form is monotone in the conductivity") {
    const TriMesh mesh = build_disk_mesh(16, 3);
    Rng rng(99);
    ConductivityField lo = unit_field(mesh), hi = unit_field(mesh);
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        lo.values[e] = 1.0 + rng.uniform();
        hi.values[e] = lo.values[e] + rng.uniform();
    }
    const Eigen::MatrixXd L_lo = dtn_matrix(mesh, lo).values;
    const Eigen::MatrixXd L_hi = dtn_matrix(mesh, hi).values;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(16);
        for (int i = 0; i < 16; ++i) x[i] = rng.normal();
        x.array() -= x.mean();
        CHECK(x.dot(L_lo * x) <= x.dot(L_hi * x) + 1e-12);
    }
}

TEST_CASE("parallel and serial DtN column solves agree bitwise") {
    const TriMesh mesh = build_disk_mesh(32, 5);
    const auto spec = sample_disks(split_seed(5, "phantom"), 2);
    const ConductivityField gamma = to_conductivity(spec, mesh);
    const Eigen::MatrixXd a = dtn_matrix(mesh, gamma, /*parallel=*/true).values;
    const Eigen::MatrixXd b = dtn_matrix(mesh, gamma, /*parallel=*/false).values;
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Dirichlet solve: constants, harmonic trace, current identity") {
    const TriMesh mesh = build_disk_mesh(32, 5);
    const ConductivityField gamma = unit_field(mesh);
    const int nb = mesh.n_boundary();

    const Eigen::VectorXd u_const =
        solve_dirichlet(mesh, gamma, Eigen::VectorXd::Constant(nb, 2.5));
    CHECK((u_const.array() - 2.5).abs().maxCoeff() < 1e-12);

    // f = x on the boundary: the harmonic extension is x itself, which lies
    // in the P1 space, so the discrete solution reproduces it exactly.
    Eigen::VectorXd fx(nb);
    for (int k = 0; k < nb; ++k) fx[k] = mesh.vertices[mesh.boundary_idx[k]].x;
    const Eigen::VectorXd u = solve_dirichlet(mesh, gamma, fx);
    const double h = 2.0 * std::sin(M_PI / nb);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        CHECK(std::abs(u[v] - mesh.vertices[v].x) < h * h * 2.0);

    // g = Lambda f equals the boundary current assembled from the weak form.
    const auto spec = sample_disks(split_seed(17, "phantom"), 2);
    const ConductivityField g2 = to_conductivity(spec, mesh);
    const StiffnessMatrix K = assemble_stiffness(mesh, g2);
    const Eigen::VectorXd u2 = solve_dirichlet(mesh, g2, fx);
    const Eigen::VectorXd g_weak = boundary_currents(mesh, K, u2);
    const Eigen::VectorXd g_dtn = dtn_matrix(mesh, g2).values * fx;
    CHECK((g_weak - g_dtn).lpNorm<Eigen::Infinity>() < 1e-10);

    // interior equations residual
    const Eigen::VectorXd res = K.full * u2;
    for (int k = 0; k < mesh.n_interior(); ++k) CHECK(std::abs(res[mesh.interior_idx[k]]) < 1e-10);
}

TEST_CASE("normalized off-diagonal block has numerical rank about 10") {
    const TriMesh mesh = build_disk_mesh(128, 22);
    const DtNMatrix background = dtn_matrix(mesh, unit_field(mesh));
    const auto spec = sample_disks(split_seed(7, "phantom"), 3);
    const DtNMatrix raw = dtn_matrix(mesh, to_conductivity(spec, mesh));
    Eigen::MatrixXd block(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            block(i, j) = raw.values(i, 64 + j) / background.values(i, 64 + j);
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(block).singularValues();
    CHECK(sv[10] / sv[0] < 1e-3);
}
