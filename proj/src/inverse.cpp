#include "eitc/inverse.hpp"

#include "eitc/vecmat.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace eitc {

SensitivityMatrix sensitivity(const TriMesh& mesh, bool parallel) {
    const int nb = mesh.n_boundary();
    const int nel = mesh.n_triangles();
    ConductivityField ones{Eigen::VectorXd::Ones(nel)};
    const StiffnessMatrix K = assemble_stiffness(mesh, ones);
    const InteriorFactorization fact(mesh, K);

    // Harmonic extensions of all boundary basis vectors: one interior solve
    // per boundary node against the shared factorization.
    const Eigen::MatrixXd rhs = -Eigen::MatrixXd(K.k_ib);
    const Eigen::MatrixXd U_i = interior_solve_block(fact, rhs, parallel); // N_I x N_B

    // Per-element constant gradients of each extension.
    const int nv = mesh.n_vertices();
    std::vector<int> pos(nv, -1);
    std::vector<char> is_b(nv, 0);
    for (int k = 0; k < nb; ++k) {
        pos[mesh.boundary_idx[k]] = k;
        is_b[mesh.boundary_idx[k]] = 1;
    }
    for (int k = 0; k < mesh.n_interior(); ++k) pos[mesh.interior_idx[k]] = k;

    Eigen::MatrixXd gx(nel, nb), gy(nel, nb);
#pragma omp parallel for schedule(static) if (parallel)
    for (int e = 0; e < nel; ++e) {
        const auto& tri = mesh.triangles[e];
        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        const double two_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double bx[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
        const double by[3] = {c.x - b.x, a.x - c.x, b.x - a.x};
        for (int k = 0; k < nb; ++k) {
            double sx = 0.0, sy = 0.0;
            for (int l = 0; l < 3; ++l) {
                const int vtx = int(tri[l]);
                const double u = is_b[vtx] ? (pos[vtx] == k ? 1.0 : 0.0) : U_i(pos[vtx], k);
                sx += u * bx[l];
                sy += u * by[l];
            }
            gx(e, k) = sx / two_area;
            gy(e, k) = sy / two_area;
        }
    }

    SensitivityMatrix J;
    J.n_boundary = nb;
    J.j.resize(nb * nb, nel);
#pragma omp parallel for schedule(static) if (parallel)
    for (int e = 0; e < nel; ++e) {
        const double area = mesh.signed_area(e);
        for (int i = 0; i < nb; ++i)
            for (int jj = 0; jj < nb; ++jj)
                J.j(i * nb + jj, e) = area * (gx(e, i) * gx(e, jj) + gy(e, i) * gy(e, jj));
    }
    return J;
}

double sensitivity_norm_sq(const SensitivityMatrix& J) {
    // Power iteration on J^T J.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(J.j.cols()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = J.j.transpose() * (J.j * v);
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

Eigen::VectorXd reconstruct_perturbation(const Eigen::MatrixXd& dtn_hat,
                                         const Eigen::MatrixXd& background,
                                         const SensitivityMatrix& J, double lambda_reg) {
    if (lambda_reg <= 0.0) throw std::invalid_argument("reconstruct: lambda_reg must be > 0");
    const int nb = J.n_boundary;
    if (dtn_hat.rows() != nb || dtn_hat.cols() != nb)
        throw std::invalid_argument("reconstruct: measurement size mismatch");
    const Eigen::MatrixXd sym = 0.5 * (dtn_hat + dtn_hat.transpose());
    const Eigen::VectorXd r = vec_rowmajor(sym - background);
    Eigen::MatrixXd normal = J.j.transpose() * J.j;
    normal.diagonal().array() += lambda_reg;
    return Eigen::LLT<Eigen::MatrixXd>(normal).solve(J.j.transpose() * r);
}

ConductivityField reconstruct(const Eigen::MatrixXd& dtn_hat, const Eigen::MatrixXd& background,
                              const SensitivityMatrix& J, const ReconstructOptions& opts) {
    double lambda = opts.lambda_reg;
    if (lambda < 0.0) lambda = 1e-3 * sensitivity_norm_sq(J);
    if (lambda <= 0.0) throw std::invalid_argument("reconstruct: lambda_reg must be > 0");
    const Eigen::VectorXd delta = reconstruct_perturbation(dtn_hat, background, J, lambda);
    ConductivityField gamma;
    gamma.values = (delta.array() + 1.0).max(opts.clip_floor);
    return gamma;
}

} // namespace eitc
