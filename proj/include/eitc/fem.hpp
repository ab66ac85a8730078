// P1 finite elements on the disk mesh: stiffness assembly for a piecewise
// constant conductivity, Dirichlet solves, and the discrete DtN matrix as the
// Schur complement of the stiffness matrix with respect to the interior block.
#pragma once

#include "eitc/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

namespace eitc {

/// Piecewise-constant conductivity, one positive value per triangle.
struct ConductivityField {
    Eigen::VectorXd values;
};

/// Assembled stiffness matrix with interior/boundary block views.
struct StiffnessMatrix {
    Eigen::SparseMatrix<double> full;   // all nodes, mesh ordering
    Eigen::SparseMatrix<double> k_ii;   // interior x interior
    Eigen::SparseMatrix<double> k_ib;   // interior x boundary
    Eigen::MatrixXd k_bb;               // boundary x boundary (small, dense)
};

/// Dense N_B x N_B DtN measurement table.
struct DtNMatrix {
    Eigen::MatrixXd values;
    bool normalized = false;
};

/// 3x3 P1 element stiffness for a single triangle (unit conductivity).
Eigen::Matrix3d element_stiffness(const Vec2& a, const Vec2& b, const Vec2& c);

StiffnessMatrix assemble_stiffness(const TriMesh& mesh, const ConductivityField& gamma);

/// Shared sparse Cholesky factorization of K_II; read-only and safe to use
/// from several workers at once.
class InteriorFactorization {
  public:
    InteriorFactorization(const TriMesh& mesh, const StiffnessMatrix& K);

    /// u_I = K_II^{-1} rhs.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    const StiffnessMatrix& stiffness() const { return *K_; }
    const TriMesh& mesh() const { return *mesh_; }

  private:
    const TriMesh* mesh_;
    std::shared_ptr<StiffnessMatrix> K_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    friend Eigen::MatrixXd interior_solve_block(const InteriorFactorization&, const Eigen::MatrixXd&, bool);
};

/// Solve K_II X = RHS column by column; parallel over columns when
/// `parallel`, serial reference otherwise. Both paths are bitwise identical.
Eigen::MatrixXd interior_solve_block(const InteriorFactorization& fact,
                                     const Eigen::MatrixXd& rhs, bool parallel);

/// Discrete DtN matrix K_BB - K_BI K_II^{-1} K_IB, raw scale.
DtNMatrix dtn_matrix(const TriMesh& mesh, const ConductivityField& gamma, bool parallel = true);
DtNMatrix dtn_matrix(const InteriorFactorization& fact, bool parallel = true);

/// Full nodal solution of the Dirichlet problem with boundary values f.
Eigen::VectorXd solve_dirichlet(const TriMesh& mesh, const ConductivityField& gamma,
                                const Eigen::VectorXd& f);

/// Boundary currents g_j = a(u, phi_j) over boundary test functions, assembled
/// from the full stiffness matrix (the definitional route to Lambda f).
Eigen::VectorXd boundary_currents(const TriMesh& mesh, const StiffnessMatrix& K,
                                  const Eigen::VectorXd& u);

/// Boundary mass matrix of the P1 trace space.
Eigen::MatrixXd boundary_mass_matrix(const TriMesh& mesh);

/// Rayleigh quotients of the DtN matrix on the discrete Fourier modes
/// cos(k theta), k = 1..k_max, normalized by the trapezoidal boundary norm
/// h*|v|^2. The continuum DtN of the unit disk maps the k-th mode to |k|, so
/// the returned quotients approximate 1, 2, ..., k_max.
Eigen::VectorXd dtn_fourier_rayleigh(const TriMesh& mesh, const Eigen::MatrixXd& dtn, int k_max);

} // namespace eitc
