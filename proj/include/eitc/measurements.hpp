// Measurement-side processing of DtN matrices: background normalization,
// observation masks of the three pattern families, and noise injection.
#pragma once

#include "eitc/fem.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace eitc {

enum class MaskKind : std::uint8_t { Principal = 0, Random = 1, Hierarchical = 2 };

std::string mask_kind_name(MaskKind kind);
MaskKind mask_kind_from_name(const std::string& name);

/// Binary observation pattern over the N_B x N_B measurement table.
struct Mask {
    Eigen::MatrixXd m; // entries exactly 0.0 or 1.0
    MaskKind kind = MaskKind::Random;
    double nominal_rate = 0.0;
    int level = 0; // hierarchical masks only
    std::uint64_t seed = 0;

    int size() const { return int(m.rows()); }
    double realized_rate() const { return m.sum() / double(m.size()); }
};

/// Normalized measurement: the Hadamard ratio against the background DtN.
struct NormalizedDtN {
    Eigen::MatrixXd values;
};

/// Guard threshold under which background entries are treated as zero and the
/// ratio passes through as 1.
double normalize_guard(const Eigen::MatrixXd& background);

NormalizedDtN normalize(const DtNMatrix& raw, const DtNMatrix& background);
DtNMatrix denormalize(const NormalizedDtN& normalized, const DtNMatrix& background);

/// Principal submatrix pattern: S x S for |S| = floor(sqrt(s) * N_B) boundary
/// nodes drawn uniformly without replacement.
Mask mask_principal(int n_boundary, double s, std::uint64_t rng_seed);

/// Entrywise iid Bernoulli(s) pattern.
Mask mask_random(int n_boundary, double s, std::uint64_t rng_seed);

/// Dyadic hierarchical pattern: all diagonal blocks at the given level fully
/// observed, every off-diagonal block Bernoulli(s_offdiag)-sampled.
Mask mask_hierarchical(int n_boundary, int level, double s_offdiag, std::uint64_t rng_seed);

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& x, const Mask& mask);

/// Multiplicative-style perturbation Lambda + sigma * (Lambda_1 .* E) with E
/// iid standard normal; applied to the raw matrix before normalization.
DtNMatrix inject_noise(const DtNMatrix& raw, const DtNMatrix& background, double sigma,
                       std::uint64_t rng_seed);

} // namespace eitc
