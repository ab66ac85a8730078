// Linearized Tikhonov reconstruction of the conductivity perturbation from a
// (completed) measurement table: one-step difference imaging at the unit
// background, the fixed downstream consumer used to rank completion quality.
#pragma once

#include "eitc/fem.hpp"

#include <Eigen/Dense>

namespace eitc {

/// Sensitivity of the DtN entries to per-element conductivity changes at the
/// unit background: J[(i,j), e] = int_e grad u_i . grad u_j dx, with u_k the
/// harmonic extension of the k-th boundary nodal basis vector. Rows are
/// indexed row-major by (i, j).
struct SensitivityMatrix {
    Eigen::MatrixXd j; // (N_B^2) x n_elements
    int n_boundary = 0;
};

SensitivityMatrix sensitivity(const TriMesh& mesh, bool parallel = true);

struct ReconstructOptions {
    double lambda_reg = -1.0; // < 0: use 1e-3 * ||J||_2^2
    double clip_floor = 0.1;
};

/// delta_gamma = argmin ||J d - vec(dtn_hat - background)||^2 + lambda ||d||^2,
/// returned as gamma = 1 + delta_gamma clipped below at the floor. The input
/// is symmetrized internally.
ConductivityField reconstruct(const Eigen::MatrixXd& dtn_hat, const Eigen::MatrixXd& background,
                              const SensitivityMatrix& J, const ReconstructOptions& opts = {});

/// Pre-clip perturbation (for linearity/regularization diagnostics).
Eigen::VectorXd reconstruct_perturbation(const Eigen::MatrixXd& dtn_hat,
                                         const Eigen::MatrixXd& background,
                                         const SensitivityMatrix& J, double lambda_reg);

/// Squared spectral norm of J (power iteration), the scale behind the default
/// regularization weight.
double sensitivity_norm_sq(const SensitivityMatrix& J);

} // namespace eitc
