#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eitc/dataset.hpp"
#include "eitc/io_util.hpp"
#include "eitc/measurements.hpp"
#include "eitc/mesh.hpp"
#include "eitc/rng.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace eitc;
namespace fs = std::filesystem;

#ifndef EITC_CLI_PATH
#define EITC_CLI_PATH "eitc"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EITC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int ret = std::system(cmd.c_str());
    return WIFEXITED(ret) ? WEXITSTATUS(ret) : -1;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("eitc_pipe_" + std::to_string(Rng(std::random_device{}()).next_u64() % 1000000));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& sub) const { return (path / sub).string(); }
};

} // namespace

TEST_CASE("record, mask, matrix and checkpoint files round-trip") {
    TempDir tmp;
    Rng rng(5);

    SampleRecord rec;
    rec.spec.centers = {{0.1, -0.2}, {-0.4, 0.3}};
    rec.spec.radii = {0.25, 0.3};
    rec.spec.contrasts = {3.5, 7.0};
    rec.dtn_raw = Eigen::MatrixXd::Random(12, 12);
    rec.dtn_normalized = Eigen::MatrixXd::Random(12, 12);
    rec.image.size = 9;
    rec.image.values = Eigen::VectorXd::Random(81);
    const std::string rp = tmp / "rec.bin";
    save_sample(rec, rp);
    const SampleRecord back = load_sample(rp);
    CHECK(back.spec.n_inclusions() == 2);
    CHECK(back.spec.radii[1] == rec.spec.radii[1]);
    CHECK((back.dtn_raw - rec.dtn_raw).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.dtn_normalized - rec.dtn_normalized).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.image.values - rec.image.values).cwiseAbs().maxCoeff() == 0.0);

    for (int trial = 0; trial < 5; ++trial) {
        const Mask m = trial % 2 == 0 ? mask_random(19, 0.3, 100 + trial)
                                      : mask_principal(19, 0.2, 100 + trial);
        const std::string mp = tmp / "mask.bin";
        save_mask(m, mp);
        const Mask mb = load_mask(mp);
        CHECK(mb.kind == m.kind);
        CHECK(mb.nominal_rate == m.nominal_rate);
        CHECK(mb.seed == m.seed);
        CHECK((mb.m - m.m).cwiseAbs().maxCoeff() == 0.0);
    }

    const Eigen::MatrixXd mat = Eigen::MatrixXd::Random(7, 13);
    save_matrix(mat, tmp / "m.bin");
    CHECK((load_matrix(tmp / "m.bin") - mat).cwiseAbs().maxCoeff() == 0.0);

    Checkpoint ck;
    ck.arch = {16, 8, 16};
    ck.T = 60;
    ck.beta_min = 1e-4;
    ck.beta_max = 0.2;
    ck.manifest_hash = 0xabcdef;
    ck.theta = Eigen::VectorXd::Random(257);
    ck.theta_ema = Eigen::VectorXd::Random(257);
    save_checkpoint(ck, tmp / "ck.bin");
    const Checkpoint cb = load_checkpoint(tmp / "ck.bin");
    CHECK(cb.arch.n_side == 16);
    CHECK(cb.T == 60);
    CHECK(cb.manifest_hash == ck.manifest_hash);
    CHECK((cb.theta - ck.theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cb.theta_ema - ck.theta_ema).cwiseAbs().maxCoeff() == 0.0);

    // Wrong magic is rejected.
    write_text_file(tmp / "junk.bin", "NOTAFILE");
    CHECK_THROWS(load_mask(tmp / "junk.bin"));
    CHECK_THROWS(load_sample(tmp / "junk.bin"));
}

TEST_CASE("gen-data is byte-for-byte reproducible and stages run end to end") {
    TempDir tmp;
    const std::string config = tmp / "desk.cfg";
    write_text_file(config,
                    "# desk-scale smoke configuration\n"
                    "n_boundary = 16\n"
                    "grid_size = 33\n"
                    "samples = 12\n"
                    "seed = 7\n"
                    "T = 60\n"
                    "beta_max = 0.25\n"
                    "base_width = 8\n"
                    "t_embed_dim = 16\n"
                    "steps = 25\n"
                    "batch = 8\n"
                    "lr = 1e-3\n"
                    "mask_kind = principal\n"
                    "mask_rate = 0.05\n"
                    "n_post = 1\n");

    REQUIRE(run_cli("gen-data --config " + config + " --out " + (tmp / "data_a")) == 0);
    REQUIRE(run_cli("gen-data --config " + config + " --out " + (tmp / "data_b")) == 0);
    CHECK(read_text_file(tmp / "data_a/manifest.txt") == read_text_file(tmp / "data_b/manifest.txt"));
    for (int i = 0; i < 12; ++i)
        CHECK(read_text_file(sample_path(tmp / "data_a/samples", i)) ==
              read_text_file(sample_path(tmp / "data_b/samples", i)));

    // Mesh gen + load.
    REQUIRE(run_cli("gen-mesh --config " + config + " --out " + (tmp / "mesh.bin")) == 0);
    CHECK(load_mesh(tmp / "mesh.bin").n_boundary() == 16);

    // Train a tiny checkpoint and complete two samples.
    REQUIRE(run_cli("train --config " + config + " --data " + (tmp / "data_a") + " --out " +
                    (tmp / "ckpt.bin")) == 0);
    CHECK(file_exists(tmp / "ckpt.bin"));
    CHECK(file_exists(tmp / "ckpt.bin.losses.csv"));

    REQUIRE(run_cli("complete --config " + config + " --data " + (tmp / "data_a") + " --ckpt " +
                    (tmp / "ckpt.bin") + " --out " + (tmp / "completed") + " --limit 2") == 0);
    CHECK(file_exists(tmp / "completed/completed_0.bin"));
    CHECK(file_exists(tmp / "completed/mask_1.bin"));
    CHECK(file_exists(tmp / "completed/re.csv"));

    // Baseline completion under a hierarchical mask.
    REQUIRE(run_cli("baseline-complete --config " + config + " --data " + (tmp / "data_a") +
                    " --out " + (tmp / "baseline") + " --mask hierarchical --level 2 --limit 2") == 0);
    CHECK(file_exists(tmp / "baseline/completed_1.bin"));

    // Reconstructions for three methods, then the evaluation table.
    REQUIRE(run_cli("reconstruct --config " + config + " --data " + (tmp / "data_a") +
                    " --method full --out " + (tmp / "recon_full") + " --limit 2") == 0);
    REQUIRE(run_cli("reconstruct --config " + config + " --data " + (tmp / "data_a") +
                    " --method diffusion --completed " + (tmp / "completed") + " --out " +
                    (tmp / "recon_diff") + " --limit 2") == 0);
    REQUIRE(run_cli("reconstruct --config " + config + " --data " + (tmp / "data_a") +
                    " --method zero-fill --completed " + (tmp / "completed") + " --out " +
                    (tmp / "recon_zf") + " --limit 2") == 0);
    REQUIRE(run_cli("evaluate --data " + (tmp / "data_a") + " --recon full=" + (tmp / "recon_full") +
                    " --recon diffusion=" + (tmp / "recon_diff") + " --recon zero-fill=" +
                    (tmp / "recon_zf") + " --out " + (tmp / "report.csv")) == 0);
    const std::string csv = read_text_file(tmp / "report.csv");
    CHECK(csv.rfind("method,rate,ssim,re,mae\n", 0) == 0);
    CHECK(csv.find("full,") != std::string::npos);
    CHECK(csv.find("zero-fill,") != std::string::npos);

    // Plots.
    REQUIRE(run_cli("plot --data " + (tmp / "data_a") + " --completed " + (tmp / "completed") +
                    " --recon " + (tmp / "recon_diff") + " --out " + (tmp / "plots") +
                    " --count 1") == 0);
    CHECK(file_exists(tmp / "plots/conductivity_0.pgm"));
    CHECK(file_exists(tmp / "plots/mask_0.pgm"));
    CHECK(file_exists(tmp / "plots/recon_error_0.ppm"));

    // Re-running a stage on unchanged inputs yields identical outputs.
    const std::string before = read_text_file(tmp / "completed/completed_0.bin");
    REQUIRE(run_cli("complete --config " + config + " --data " + (tmp / "data_a") + " --ckpt " +
                    (tmp / "ckpt.bin") + " --out " + (tmp / "completed") + " --limit 2") == 0);
    CHECK(read_text_file(tmp / "completed/completed_0.bin") == before);
}

TEST_CASE("exit codes: missing inputs and config errors") {
    TempDir tmp;
    CHECK(run_cli("train --data " + (tmp / "nonexistent") + " --out " + (tmp / "x.bin")) == 3);
    CHECK(run_cli("complete --data " + (tmp / "nonexistent") + " --ckpt " + (tmp / "no.bin") +
                  " --out " + (tmp / "c")) == 3);

    const std::string bad = tmp / "bad.cfg";
    write_text_file(bad, "unknown_key = 12\n");
    CHECK(run_cli("gen-mesh --config " + bad + " --out " + (tmp / "m.bin")) == 2);
    const std::string bad2 = tmp / "bad2.cfg";
    write_text_file(bad2, "n_boundary twelve\n");
    CHECK(run_cli("gen-mesh --config " + bad2 + " --out " + (tmp / "m.bin")) == 2);
}
