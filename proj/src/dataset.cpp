#include "eitc/dataset.hpp"

#include "eitc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace eitc {

namespace {
constexpr char kSampleMagic[8] = {'E', 'I', 'T', 'S', 'M', 'P', '0', '1'};
constexpr char kMaskMagic[8] = {'E', 'I', 'T', 'M', 'S', 'K', '0', '1'};
constexpr char kCkptMagic[8] = {'E', 'I', 'T', 'C', 'K', 'P', 'T', '1'};

void write_matrix(BinaryWriter& w, const Eigen::MatrixXd& m) {
    // Row-major entry order, matching the vectorization convention.
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) w.write_f64(m(i, j));
}

Eigen::MatrixXd read_matrix(BinaryReader& r, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = r.read_f64();
    return m;
}
} // namespace

void save_sample(const SampleRecord& record, const std::string& path) {
    BinaryWriter w(path);
    w.write_bytes(kSampleMagic, 8);
    const int nb = int(record.dtn_raw.rows());
    w.write_u32(std::uint32_t(nb));
    w.write_u32(std::uint32_t(record.image.size));
    w.write_u32(std::uint32_t(record.spec.n_inclusions()));
    for (int i = 0; i < record.spec.n_inclusions(); ++i) {
        w.write_f64(record.spec.centers[i].x);
        w.write_f64(record.spec.centers[i].y);
        w.write_f64(record.spec.radii[i]);
        w.write_f64(record.spec.contrasts[i]);
    }
    write_matrix(w, record.dtn_raw);
    write_matrix(w, record.dtn_normalized);
    w.write_f64s(record.image.values.data(), record.image.values.size());
}

SampleRecord load_sample(const std::string& path) {
    BinaryReader r(path);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::memcmp(magic, kSampleMagic, 8) != 0)
        throw std::runtime_error("not a sample record: " + path);
    SampleRecord rec;
    const int nb = int(r.read_u32());
    const int grid = int(r.read_u32());
    const int n = int(r.read_u32());
    for (int i = 0; i < n; ++i) {
        Vec2 c;
        c.x = r.read_f64();
        c.y = r.read_f64();
        rec.spec.centers.push_back(c);
        rec.spec.radii.push_back(r.read_f64());
        rec.spec.contrasts.push_back(r.read_f64());
    }
    rec.dtn_raw = read_matrix(r, nb, nb);
    rec.dtn_normalized = read_matrix(r, nb, nb);
    rec.image.size = grid;
    rec.image.values.resize(grid * grid);
    r.read_f64s(rec.image.values.data(), rec.image.values.size());
    return rec;
}

std::string DatasetManifest::to_text() const {
    std::ostringstream ss;
    ss << "eitc dataset manifest v1\n";
    ss << "samples = " << n_samples << "\n";
    ss << "n_boundary = " << n_boundary << "\n";
    ss << "n_rings = " << n_rings << "\n";
    ss << "grid_size = " << grid_size << "\n";
    ss << "master_seed = " << master_seed << "\n";
    ss << "config_hash = " << config_hash << "\n";
    ss << "distribution = " << distribution << "\n";
    return ss.str();
}

DatasetManifest DatasetManifest::from_text(const std::string& text) {
    DatasetManifest m;
    std::istringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != "eitc dataset manifest v1")
        throw std::runtime_error("unrecognized manifest header");
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && s.front() == ' ') s.erase(s.begin());
            while (!s.empty() && s.back() == ' ') s.pop_back();
        };
        trim(key);
        trim(val);
        if (key == "samples") m.n_samples = std::stoi(val);
        else if (key == "n_boundary") m.n_boundary = std::stoi(val);
        else if (key == "n_rings") m.n_rings = std::stoi(val);
        else if (key == "grid_size") m.grid_size = std::stoi(val);
        else if (key == "master_seed") m.master_seed = std::stoull(val);
        else if (key == "config_hash") m.config_hash = std::stoull(val);
        else if (key == "distribution") m.distribution = val;
    }
    return m;
}

std::string sample_path(const std::string& dir, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%05d.bin", index);
    return dir + "/" + buf;
}

namespace {
constexpr char kMatrixMagic[8] = {'E', 'I', 'T', 'M', 'A', 'T', '0', '1'};
}

void save_matrix(const Eigen::MatrixXd& m, const std::string& path) {
    BinaryWriter w(path);
    w.write_bytes(kMatrixMagic, 8);
    w.write_u32(std::uint32_t(m.rows()));
    w.write_u32(std::uint32_t(m.cols()));
    write_matrix(w, m);
}

Eigen::MatrixXd load_matrix(const std::string& path) {
    BinaryReader r(path);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::memcmp(magic, kMatrixMagic, 8) != 0)
        throw std::runtime_error("not a matrix file: " + path);
    const int rows = int(r.read_u32());
    const int cols = int(r.read_u32());
    return read_matrix(r, rows, cols);
}

void save_mask(const Mask& mask, const std::string& path) {
    BinaryWriter w(path);
    w.write_bytes(kMaskMagic, 8);
    w.write_u8(std::uint8_t(mask.kind));
    w.write_f64(mask.nominal_rate);
    w.write_u32(std::uint32_t(mask.level));
    w.write_u64(mask.seed);
    const int n = mask.size();
    w.write_u32(std::uint32_t(n));
    const int bytes_per_row = (n + 7) / 8;
    std::vector<std::uint8_t> row(bytes_per_row);
    for (int i = 0; i < n; ++i) {
        std::fill(row.begin(), row.end(), 0);
        for (int j = 0; j < n; ++j)
            if (mask.m(i, j) != 0.0) row[j / 8] |= std::uint8_t(1u << (j % 8));
        w.write_bytes(row.data(), row.size());
    }
}

Mask load_mask(const std::string& path) {
    BinaryReader r(path);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::memcmp(magic, kMaskMagic, 8) != 0)
        throw std::runtime_error("not a mask record: " + path);
    Mask mask;
    mask.kind = MaskKind(r.read_u8());
    mask.nominal_rate = r.read_f64();
    mask.level = int(r.read_u32());
    mask.seed = r.read_u64();
    const int n = int(r.read_u32());
    mask.m = Eigen::MatrixXd::Zero(n, n);
    const int bytes_per_row = (n + 7) / 8;
    std::vector<std::uint8_t> row(bytes_per_row);
    for (int i = 0; i < n; ++i) {
        r.read_bytes(row.data(), row.size());
        for (int j = 0; j < n; ++j)
            if (row[j / 8] & (1u << (j % 8))) mask.m(i, j) = 1.0;
    }
    return mask;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    BinaryWriter w(path);
    w.write_bytes(kCkptMagic, 8);
    w.write_u32(std::uint32_t(ckpt.arch.n_side));
    w.write_u32(std::uint32_t(ckpt.arch.base_width));
    w.write_u32(std::uint32_t(ckpt.arch.t_embed_dim));
    w.write_u32(std::uint32_t(ckpt.T));
    w.write_f64(ckpt.beta_min);
    w.write_f64(ckpt.beta_max);
    w.write_u64(ckpt.manifest_hash);
    w.write_u64(std::uint64_t(ckpt.theta.size()));
    w.write_f64s(ckpt.theta.data(), ckpt.theta.size());
    w.write_f64s(ckpt.theta_ema.data(), ckpt.theta_ema.size());
}

Checkpoint load_checkpoint(const std::string& path) {
    BinaryReader r(path);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::memcmp(magic, kCkptMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint: " + path);
    Checkpoint c;
    c.arch.n_side = int(r.read_u32());
    c.arch.base_width = int(r.read_u32());
    c.arch.t_embed_dim = int(r.read_u32());
    c.T = int(r.read_u32());
    c.beta_min = r.read_f64();
    c.beta_max = r.read_f64();
    c.manifest_hash = r.read_u64();
    const auto np = r.read_u64();
    c.theta.resize(Eigen::Index(np));
    c.theta_ema.resize(Eigen::Index(np));
    r.read_f64s(c.theta.data(), np);
    r.read_f64s(c.theta_ema.data(), np);
    return c;
}

Eigen::MatrixXd grid_to_matrix(const GridImage& image) {
    Eigen::MatrixXd m(image.size, image.size);
    for (int j = 0; j < image.size; ++j)
        for (int i = 0; i < image.size; ++i) m(j, i) = image.at(i, j);
    return m;
}

void write_pgm(const Eigen::MatrixXd& values, const std::string& path, double lo, double hi) {
    if (hi <= lo) {
        lo = values.minCoeff();
        hi = values.maxCoeff();
        if (hi <= lo) hi = lo + 1.0;
    }
    std::ostringstream ss;
    ss << "P5\n" << values.cols() << " " << values.rows() << "\n255\n";
    std::string header = ss.str();
    std::string body;
    body.reserve(values.size());
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double t = std::clamp((values(i, j) - lo) / (hi - lo), 0.0, 1.0);
            body.push_back(char(std::uint8_t(std::lround(255.0 * t))));
        }
    write_text_file(path, header + body);
}

void write_ppm_diverging(const Eigen::MatrixXd& values, const std::string& path) {
    const double amax = std::max(1e-300, values.cwiseAbs().maxCoeff());
    std::ostringstream ss;
    ss << "P6\n" << values.cols() << " " << values.rows() << "\n255\n";
    std::string out = ss.str();
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double t = std::clamp(values(i, j) / amax, -1.0, 1.0);
            // blue (negative) -> white -> red (positive)
            const double r = t >= 0 ? 1.0 : 1.0 + t;
            const double g = 1.0 - std::abs(t);
            const double b = t <= 0 ? 1.0 : 1.0 - t;
            out.push_back(char(std::uint8_t(std::lround(255.0 * r))));
            out.push_back(char(std::uint8_t(std::lround(255.0 * g))));
            out.push_back(char(std::uint8_t(std::lround(255.0 * b))));
        }
    write_text_file(path, out);
}

} // namespace eitc
