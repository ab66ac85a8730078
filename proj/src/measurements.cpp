#include "eitc/measurements.hpp"

#include "eitc/lowrank.hpp"
#include "eitc/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace eitc {

std::string mask_kind_name(MaskKind kind) {
    switch (kind) {
        case MaskKind::Principal: return "principal";
        case MaskKind::Random: return "random";
        case MaskKind::Hierarchical: return "hierarchical";
    }
    return "unknown";
}

MaskKind mask_kind_from_name(const std::string& name) {
    if (name == "principal") return MaskKind::Principal;
    if (name == "random") return MaskKind::Random;
    if (name == "hierarchical") return MaskKind::Hierarchical;
    throw std::invalid_argument("unknown mask kind: " + name);
}

double normalize_guard(const Eigen::MatrixXd& background) {
    return 1e-14 * background.cwiseAbs().maxCoeff();
}

NormalizedDtN normalize(const DtNMatrix& raw, const DtNMatrix& background) {
    if (raw.values.rows() != background.values.rows() ||
        raw.values.cols() != background.values.cols())
        throw std::invalid_argument("normalize: shape mismatch");
    const double guard = normalize_guard(background.values);
    NormalizedDtN out;
    out.values = raw.values;
    for (Eigen::Index j = 0; j < out.values.cols(); ++j)
        for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
            const double b = background.values(i, j);
            out.values(i, j) = (std::abs(b) < guard) ? 1.0 : out.values(i, j) / b;
        }
    return out;
}

DtNMatrix denormalize(const NormalizedDtN& normalized, const DtNMatrix& background) {
    if (normalized.values.rows() != background.values.rows() ||
        normalized.values.cols() != background.values.cols())
        throw std::invalid_argument("denormalize: shape mismatch");
    const double guard = normalize_guard(background.values);
    DtNMatrix out;
    out.values = normalized.values;
    out.normalized = false;
    for (Eigen::Index j = 0; j < out.values.cols(); ++j)
        for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
            const double b = background.values(i, j);
            out.values(i, j) = (std::abs(b) < guard) ? b : out.values(i, j) * b;
        }
    return out;
}

Mask mask_principal(int n_boundary, double s, std::uint64_t rng_seed) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("mask_principal: rate must be in (0,1]");
    const int k = int(std::floor(std::sqrt(s) * n_boundary));
    if (k == 0) throw std::invalid_argument("mask_principal: rate too small for this N_B");
    Rng rng(rng_seed);
    std::vector<int> idx(n_boundary);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) { // partial Fisher-Yates
        const int j = i + int(rng.uniform_int(0, n_boundary - 1 - i));
        std::swap(idx[i], idx[j]);
    }
    Mask mask;
    mask.kind = MaskKind::Principal;
    mask.nominal_rate = s;
    mask.seed = rng_seed;
    mask.m = Eigen::MatrixXd::Zero(n_boundary, n_boundary);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) mask.m(idx[a], idx[b]) = 1.0;
    return mask;
}

Mask mask_random(int n_boundary, double s, std::uint64_t rng_seed) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("mask_random: rate must be in [0,1]");
    Rng rng(rng_seed);
    Mask mask;
    mask.kind = MaskKind::Random;
    mask.nominal_rate = s;
    mask.seed = rng_seed;
    mask.m = Eigen::MatrixXd::Zero(n_boundary, n_boundary);
    for (int i = 0; i < n_boundary; ++i)
        for (int j = 0; j < n_boundary; ++j) mask.m(i, j) = rng.bernoulli(s) ? 1.0 : 0.0;
    return mask;
}

Mask mask_hierarchical(int n_boundary, int level, double s_offdiag, std::uint64_t rng_seed) {
    const HierarchicalPartition part = partition(n_boundary, level); // checks divisibility
    Rng rng(rng_seed);
    Mask mask;
    mask.kind = MaskKind::Hierarchical;
    mask.nominal_rate = s_offdiag;
    mask.level = level;
    mask.seed = rng_seed;
    mask.m = Eigen::MatrixXd::Zero(n_boundary, n_boundary);
    for (const auto& b : part.diagonal)
        mask.m.block(b.row0, b.col0, b.rows, b.cols).setOnes();
    for (const auto& b : part.offdiagonal)
        for (int i = 0; i < b.rows; ++i)
            for (int j = 0; j < b.cols; ++j)
                mask.m(b.row0 + i, b.col0 + j) = rng.bernoulli(s_offdiag) ? 1.0 : 0.0;
    return mask;
}

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& x, const Mask& mask) {
    if (x.rows() != mask.m.rows() || x.cols() != mask.m.cols())
        throw std::invalid_argument("apply_mask: shape mismatch");
    return x.cwiseProduct(mask.m);
}

DtNMatrix inject_noise(const DtNMatrix& raw, const DtNMatrix& background, double sigma,
                       std::uint64_t rng_seed) {
    if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("inject_noise: sigma must be in [0,1)");
    if (raw.values.rows() != background.values.rows() ||
        raw.values.cols() != background.values.cols())
        throw std::invalid_argument("inject_noise: shape mismatch");
    DtNMatrix out = raw;
    if (sigma == 0.0) return out;
    Rng rng(rng_seed);
    // Row-major draw order so the realization is reproducible entrywise.
    for (Eigen::Index i = 0; i < out.values.rows(); ++i)
        for (Eigen::Index j = 0; j < out.values.cols(); ++j)
            out.values(i, j) += sigma * background.values(i, j) * rng.normal();
    return out;
}

} // namespace eitc
