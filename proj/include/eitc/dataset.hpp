// On-disk artifact formats: dataset directories with a human-readable
// manifest plus per-sample binary records, bit-packed mask records, denoiser
// checkpoints, and portable graymap/pixmap emitters.
#pragma once

#include "eitc/denoiser.hpp"
#include "eitc/measurements.hpp"
#include "eitc/phantoms.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eitc {

/// One generated sample: phantom spec, raw and normalized measurement
/// tables, and the rasterized conductivity.
struct SampleRecord {
    DiskPhantomSpec spec;
    Eigen::MatrixXd dtn_raw;
    Eigen::MatrixXd dtn_normalized;
    GridImage image;
};

void save_sample(const SampleRecord& record, const std::string& path);
SampleRecord load_sample(const std::string& path);

struct DatasetManifest {
    int n_samples = 0;
    int n_boundary = 0;
    int n_rings = 0;
    int grid_size = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;
    std::string distribution = "disks(n=2..5, r~U[0.2,0.4], c~U[2,8])";

    std::string to_text() const;
    static DatasetManifest from_text(const std::string& text);
};

std::string sample_path(const std::string& dir, int index);

/// Bit-packed mask rows with (kind, rate, seed) header.
void save_mask(const Mask& mask, const std::string& path);
Mask load_mask(const std::string& path);

/// Bare dense matrix file (row-major float64), for background tables,
/// completed measurements and reconstruction grids.
void save_matrix(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix(const std::string& path);

struct Checkpoint {
    ConvDenoiserConfig arch;
    int T = 0;
    double beta_min = 0.0, beta_max = 0.0;
    std::uint64_t manifest_hash = 0;
    Eigen::VectorXd theta;
    Eigen::VectorXd theta_ema;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Grayscale PGM, linearly mapped from [lo, hi] (auto range when lo >= hi).
void write_pgm(const Eigen::MatrixXd& values, const std::string& path, double lo = 0.0,
               double hi = -1.0);
/// Diverging blue-white-red PPM centered at zero; for signed error maps.
void write_ppm_diverging(const Eigen::MatrixXd& values, const std::string& path);

Eigen::MatrixXd grid_to_matrix(const GridImage& image);

} // namespace eitc
