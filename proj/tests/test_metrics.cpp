#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/metrics.hpp"

#include <cmath>

using namespace eitc;

namespace {
GridImage disk_image(int size, double inside, double outside = 0.0) {
    GridImage img;
    img.size = size;
    img.values = Eigen::VectorXd::Constant(size * size, outside);
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const double x = GridImage::coord(i, size), y = GridImage::coord(j, size);
            if (x * x + y * y <= 1.0) img.at(i, j) = inside;
        }
    return img;
}
} // namespace

TEST_CASE("relative Frobenius error identities") {
    Eigen::MatrixXd truth = Eigen::MatrixXd::Random(9, 9);
    CHECK(re_frobenius(truth, truth) == 0.0);
    CHECK(re_frobenius(Eigen::MatrixXd::Zero(9, 9), truth) == doctest::Approx(1.0));
    CHECK(re_frobenius(1.1 * truth, truth) == doctest::Approx(0.1));
    CHECK_THROWS_AS(re_frobenius(truth, Eigen::MatrixXd::Zero(9, 9)), std::invalid_argument);
    CHECK_THROWS_AS(re_frobenius(truth, Eigen::MatrixXd::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("conductivity errors over the disk-interior grid only") {
    const int g = 64;
    GridImage truth = disk_image(g, 1.0);
    GridImage est = disk_image(g, 1.5);
    const ConductivityErrors e = conductivity_errors(est, truth);
    CHECK(e.mae == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e.re == doctest::Approx(0.5).epsilon(1e-12));

    const ConductivityErrors zero = conductivity_errors(truth, truth);
    CHECK(zero.re == 0.0);
    CHECK(zero.mae == 0.0);

    // Pixels outside the disk never affect the result.
    GridImage corrupted = est;
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) {
            const double x = GridImage::coord(i, g), y = GridImage::coord(j, g);
            if (x * x + y * y > 1.0) corrupted.at(i, j) = 1e9;
        }
    const ConductivityErrors same = conductivity_errors(corrupted, truth);
    CHECK(same.re == e.re);
    CHECK(same.mae == e.mae);
}

TEST_CASE("ssim identities and anti-correlation") {
    const int g = 64;
    GridImage a;
    a.size = g;
    a.values.resize(g * g);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) a.at(i, j) = double((i / 4 + j / 4) % 2); // checkerboard

    CHECK(ssim(a, a, 7, 1e-4, 9e-4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ssim_default(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    GridImage b = a;
    for (int k = 0; k < g * g; ++k) b.values[k] = 1.0 - a.values[k];
    CHECK(ssim(a, b, 7, 1e-4, 9e-4) < 0.1);

    // Symmetric in its two arguments for fixed constants.
    CHECK(ssim(a, b, 7, 1e-4, 9e-4) == doctest::Approx(ssim(b, a, 7, 1e-4, 9e-4)).epsilon(1e-12));

    CHECK_THROWS_AS(ssim(a, b, 8, 1e-4, 9e-4), std::invalid_argument);
    CHECK_THROWS_AS(ssim(a, b, g + 1, 1e-4, 9e-4), std::invalid_argument);
    CHECK(ssim(a, b, 7, 1e-4, 9e-4) >= -1.0);
    CHECK(ssim(a, b, 7, 1e-4, 9e-4) <= 1.0);
}

TEST_CASE("evaluation report aggregates per-method means") {
    std::map<std::string, std::vector<ConductivityErrors>> cond;
    std::map<std::string, std::vector<double>> ssims;
    std::map<std::string, double> rates;
    cond["full"] = {{0.2, 0.1}, {0.4, 0.3}};
    ssims["full"] = {0.9, 0.7};
    rates["full"] = 1.0;
    cond["diffusion"] = {{0.3, 0.2}};
    ssims["diffusion"] = {0.8};
    rates["diffusion"] = 0.01;

    const EvaluationReport rep =
        evaluation_report({"full", "diffusion", "absent"}, cond, ssims, rates);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].method == "full");
    CHECK(rep.rows[0].re == doctest::Approx(0.3));
    CHECK(rep.rows[0].mae == doctest::Approx(0.2));
    CHECK(rep.rows[0].ssim == doctest::Approx(0.8));
    CHECK(rep.rows[1].rate == doctest::Approx(0.01));
    REQUIRE(rep.missing.size() == 1);
    CHECK(rep.missing[0] == "absent");

    // One method, one sample: the row is the per-sample metric.
    std::map<std::string, std::vector<ConductivityErrors>> one{{"m", {{0.11, 0.22}}}};
    std::map<std::string, std::vector<double>> sone{{"m", {0.5}}};
    const EvaluationReport single = evaluation_report({"m"}, one, sone, {});
    CHECK(single.rows[0].re == doctest::Approx(0.11));
    CHECK(single.rows[0].mae == doctest::Approx(0.22));
    CHECK(single.rows[0].ssim == doctest::Approx(0.5));

    const std::string csv = rep.to_csv();
    CHECK(csv.rfind("method,rate,ssim,re,mae\n", 0) == 0);
    CHECK(csv.find("full,") != std::string::npos);
}
