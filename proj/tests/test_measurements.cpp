#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/measurements.hpp"
#include "eitc/mesh.hpp"
#include "eitc/phantoms.hpp"
#include "eitc/rng.hpp"

#include <cmath>

using namespace eitc;

namespace {
struct Fixture {
    TriMesh mesh = build_disk_mesh(32, 5);
    DtNMatrix background;
    DtNMatrix raw;
    Fixture() {
        background = dtn_matrix(mesh, {Eigen::VectorXd::Ones(mesh.n_triangles())});
        const auto spec = sample_disks(split_seed(31, "phantom"), 3);
        raw = dtn_matrix(mesh, to_conductivity(spec, mesh));
    }
};
} // namespace

TEST_CASE("self-normalization gives the all-ones table") {
    Fixture f;
    const NormalizedDtN n = normalize(f.background, f.background);
    CHECK((n.values.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize/denormalize round-trip off the guard set") {
    Fixture f;
    const double guard = normalize_guard(f.background.values);
    const NormalizedDtN n = normalize(f.raw, f.background);
    const DtNMatrix back = denormalize(n, f.background);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            if (std::abs(f.background.values(i, j)) >= guard)
                CHECK(back.values(i, j) ==
                      doctest::Approx(f.raw.values(i, j)).epsilon(1e-12));
    CHECK_THROWS_AS(normalize(DtNMatrix{Eigen::MatrixXd::Zero(8, 8), false}, f.background),
                    std::invalid_argument);
}

TEST_CASE("normalization enhances the contrast between phantoms") {
    Fixture f;
    const auto spec2 = sample_disks(split_seed(32, "phantom"), 3);
    const DtNMatrix raw2 = dtn_matrix(f.mesh, to_conductivity(spec2, f.mesh));
    const Eigen::MatrixXd n1 = normalize(f.raw, f.background).values;
    const Eigen::MatrixXd n2 = normalize(raw2, f.background).values;
    const double normalized_diff = (n1 - n2).norm();
    const double raw_diff = (f.raw.values - raw2.values).norm();
    CHECK(normalized_diff / raw_diff > 10.0);
    // Relative spread is larger after normalization as well.
    CHECK(normalized_diff / n1.norm() > 5.0 * raw_diff / f.raw.values.norm());
}

TEST_CASE("principal mask arithmetic") {
    const Mask m = mask_principal(128, 0.01, 7);
    CHECK(m.m.sum() == 144.0); // |S| = floor(0.1 * 128) = 12
    CHECK(m.realized_rate() == doctest::Approx(144.0 / 16384.0));

    const Mask full = mask_principal(32, 1.0, 7);
    CHECK(full.m.sum() == 32.0 * 32.0);

    const Mask quarter = mask_principal(32, 0.25, 7);
    CHECK(quarter.m.sum() == 256.0); // |S| = 16

    CHECK_THROWS_AS(mask_principal(8, 0.001, 7), std::invalid_argument);

    // Pattern is exactly an S x S indicator: rank one as a 0/1 matrix.
    Eigen::VectorXd rows = quarter.m.rowwise().sum();
    for (int i = 0; i < 32; ++i) CHECK((rows[i] == 0.0 || rows[i] == 16.0));
}

TEST_CASE("random mask endpoints and concentration") {
    CHECK(mask_random(16, 0.0, 3).m.sum() == 0.0);
    CHECK(mask_random(16, 1.0, 3).m.sum() == 256.0);
    const Mask m = mask_random(128, 0.15, 99);
    const double sigma = std::sqrt(0.15 * 0.85) / 128.0;
    CHECK(std::abs(m.realized_rate() - 0.15) <= 3.0 * sigma);
}

TEST_CASE("hierarchical mask structure and rate") {
    const Mask m = mask_hierarchical(128, 3, 0.15, 5);
    // All 16x16 diagonal blocks fully observed.
    for (int b = 0; b < 8; ++b)
        CHECK(m.m.block(16 * b, 16 * b, 16, 16).sum() == 256.0);
    // Expected overall rate (2048 + 0.15*14336)/16384 = 25.625%.
    const double expected = 0.25625;
    const double sigma = std::sqrt(14336.0 * 0.15 * 0.85) / 16384.0;
    CHECK(std::abs(m.realized_rate() - expected) <= 3.0 * sigma);

    CHECK(mask_hierarchical(32, 2, 1.0, 5).m.sum() == 1024.0);
    CHECK_THROWS_AS(mask_hierarchical(36, 3, 0.15, 5), std::invalid_argument);
}

TEST_CASE("masks are bit-deterministic under a fixed seed") {
    for (int variant = 0; variant < 3; ++variant) {
        auto draw = [&](std::uint64_t seed) {
            switch (variant) {
                case 0: return mask_principal(32, 0.25, seed);
                case 1: return mask_random(32, 0.3, seed);
                default: return mask_hierarchical(32, 2, 0.2, seed);
            }
        };
        const Mask a = draw(1234567), b = draw(1234567), c = draw(7654321);
        CHECK((a.m - b.m).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.m - c.m).cwiseAbs().maxCoeff() != 0.0);
    }
}

TEST_CASE("apply_mask endpoints and idempotence") {
    Fixture f;
    Mask ones = mask_random(32, 1.0, 1);
    Mask zeros = mask_random(32, 0.0, 1);
    Mask half = mask_random(32, 0.5, 1);
    CHECK((apply_mask(f.raw.values, ones) - f.raw.values).norm() == 0.0);
    CHECK(apply_mask(f.raw.values, zeros).norm() == 0.0);
    const Eigen::MatrixXd once = apply_mask(f.raw.values, half);
    CHECK((apply_mask(once, half) - once).norm() == 0.0);
}

TEST_CASE("noise injection commutes with normalization") {
    Fixture f;
    CHECK((inject_noise(f.raw, f.background, 0.0, 9).values - f.raw.values).norm() == 0.0);

    const double sigma = 0.05;
    const std::uint64_t seed = 424242;
    const DtNMatrix noisy = inject_noise(f.raw, f.background, sigma, seed);
    // Reconstruct the same Gaussian field the generator drew.
    Rng rng(seed);
    Eigen::MatrixXd E(32, 32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) E(i, j) = rng.normal();
    const Eigen::MatrixXd lhs = normalize(noisy, f.background).values;
    const Eigen::MatrixXd rhs = normalize(f.raw, f.background).values + sigma * E;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(inject_noise(f.raw, f.background, 1.0, 9), std::invalid_argument);
}
