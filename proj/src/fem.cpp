#include "eitc/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eitc {

Eigen::Matrix3d element_stiffness(const Vec2& a, const Vec2& b, const Vec2& c) {
    // grad(phi_i) = perp(opposite edge) / (2 area); K_ij = area * grad_i . grad_j
    const double bx[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
    const double by[3] = {c.x - b.x, a.x - c.x, b.x - a.x};
    const double two_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    Eigen::Matrix3d K;
    const double scale = 1.0 / (2.0 * two_area);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K(i, j) = scale * (bx[i] * bx[j] + by[i] * by[j]);
    return K;
}

StiffnessMatrix assemble_stiffness(const TriMesh& mesh, const ConductivityField& gamma) {
    if (gamma.values.size() != mesh.n_triangles())
        throw std::invalid_argument("assemble_stiffness: gamma length must equal triangle count");
    for (int e = 0; e < gamma.values.size(); ++e)
        if (!(gamma.values[e] > 0.0) || !std::isfinite(gamma.values[e]))
            throw std::invalid_argument("assemble_stiffness: conductivity must be positive and finite");

    const int nv = mesh.n_vertices();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(9 * size_t(mesh.n_triangles()));
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Matrix3d Ke = gamma.values[t] * element_stiffness(mesh.vertices[tri[0]],
                                                                       mesh.vertices[tri[1]],
                                                                       mesh.vertices[tri[2]]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trips.emplace_back(int(tri[i]), int(tri[j]), Ke(i, j));
    }

    StiffnessMatrix K;
    K.full.resize(nv, nv);
    K.full.setFromTriplets(trips.begin(), trips.end());

    // Node -> position within its index set.
    const int ni = mesh.n_interior(), nb = mesh.n_boundary();
    std::vector<int> pos(nv, -1);
    std::vector<char> is_b(nv, 0);
    for (int k = 0; k < nb; ++k) {
        pos[mesh.boundary_idx[k]] = k;
        is_b[mesh.boundary_idx[k]] = 1;
    }
    for (int k = 0; k < ni; ++k) pos[mesh.interior_idx[k]] = k;

    std::vector<Eigen::Triplet<double>> t_ii, t_ib;
    K.k_bb = Eigen::MatrixXd::Zero(nb, nb);
    for (int col = 0; col < K.full.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(K.full, col); it; ++it) {
            const int r = int(it.row()), c = int(it.col());
            if (!is_b[r] && !is_b[c]) t_ii.emplace_back(pos[r], pos[c], it.value());
            else if (!is_b[r] && is_b[c]) t_ib.emplace_back(pos[r], pos[c], it.value());
            else if (is_b[r] && is_b[c]) K.k_bb(pos[r], pos[c]) += it.value();
        }
    }
    K.k_ii.resize(ni, ni);
    K.k_ii.setFromTriplets(t_ii.begin(), t_ii.end());
    K.k_ib.resize(ni, nb);
    K.k_ib.setFromTriplets(t_ib.begin(), t_ib.end());
    return K;
}

InteriorFactorization::InteriorFactorization(const TriMesh& mesh, const StiffnessMatrix& K)
    : mesh_(&mesh), K_(std::make_shared<StiffnessMatrix>(K)) {
    llt_.compute(K_->k_ii);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("interior stiffness block is not SPD (invalid mesh or conductivity)");
}

Eigen::VectorXd InteriorFactorization::solve(const Eigen::VectorXd& rhs) const {
    return llt_.solve(rhs);
}

Eigen::MatrixXd interior_solve_block(const InteriorFactorization& fact,
                                     const Eigen::MatrixXd& rhs, bool parallel) {
    Eigen::MatrixXd X(rhs.rows(), rhs.cols());
    const int nc = int(rhs.cols());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j < nc; ++j) X.col(j) = fact.llt_.solve(rhs.col(j));
    } else {
        for (int j = 0; j < nc; ++j) X.col(j) = fact.llt_.solve(rhs.col(j));
    }
    return X;
}

DtNMatrix dtn_matrix(const InteriorFactorization& fact, bool parallel) {
    const StiffnessMatrix& K = fact.stiffness();
    const Eigen::MatrixXd rhs = Eigen::MatrixXd(K.k_ib);
    const Eigen::MatrixXd X = interior_solve_block(fact, rhs, parallel); // K_II^{-1} K_IB
    DtNMatrix out;
    out.values = K.k_bb - Eigen::MatrixXd(K.k_ib.transpose()) * X;
    out.normalized = false;
    return out;
}

DtNMatrix dtn_matrix(const TriMesh& mesh, const ConductivityField& gamma, bool parallel) {
    const StiffnessMatrix K = assemble_stiffness(mesh, gamma);
    const InteriorFactorization fact(mesh, K);
    return dtn_matrix(fact, parallel);
}

Eigen::VectorXd solve_dirichlet(const TriMesh& mesh, const ConductivityField& gamma,
                                const Eigen::VectorXd& f) {
    if (f.size() != mesh.n_boundary())
        throw std::invalid_argument("solve_dirichlet: f length must equal boundary node count");
    const StiffnessMatrix K = assemble_stiffness(mesh, gamma);
    const InteriorFactorization fact(mesh, K);
    const Eigen::VectorXd u_i = fact.solve(Eigen::VectorXd(-(K.k_ib * f)));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.n_vertices());
    for (int k = 0; k < mesh.n_interior(); ++k) u[mesh.interior_idx[k]] = u_i[k];
    for (int k = 0; k < mesh.n_boundary(); ++k) u[mesh.boundary_idx[k]] = f[k];
    return u;
}

Eigen::VectorXd boundary_currents(const TriMesh& mesh, const StiffnessMatrix& K,
                                  const Eigen::VectorXd& u) {
    const Eigen::VectorXd Ku = K.full * u;
    Eigen::VectorXd g(mesh.n_boundary());
    for (int k = 0; k < mesh.n_boundary(); ++k) g[k] = Ku[mesh.boundary_idx[k]];
    return g;
}

Eigen::VectorXd dtn_fourier_rayleigh(const TriMesh& mesh, const Eigen::MatrixXd& dtn, int k_max) {
    const int nb = mesh.n_boundary();
    const double h = 2.0 * std::sin(3.14159265358979323846 / nb); // uniform chord length
    Eigen::VectorXd rq(k_max);
    for (int k = 1; k <= k_max; ++k) {
        Eigen::VectorXd v(nb);
        for (int j = 0; j < nb; ++j) v[j] = std::cos(6.283185307179586 * k * j / nb);
        rq[k - 1] = v.dot(dtn * v) / (h * v.squaredNorm());
    }
    return rq;
}

Eigen::MatrixXd boundary_mass_matrix(const TriMesh& mesh) {
    const int nb = mesh.n_boundary();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
    for (int k = 0; k < nb; ++k) {
        const int k1 = (k + 1) % nb;
        const Vec2& a = mesh.vertices[mesh.boundary_idx[k]];
        const Vec2& b = mesh.vertices[mesh.boundary_idx[k1]];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        M(k, k) += len / 3.0;
        M(k1, k1) += len / 3.0;
        M(k, k1) += len / 6.0;
        M(k1, k) += len / 6.0;
    }
    return M;
}

} // namespace eitc
