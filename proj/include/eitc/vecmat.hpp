// Fixed matrix <-> vector convention for the diffusion machinery: row-major
// vectorization of the N_B x N_B measurement table.
#pragma once

#include <Eigen/Dense>

namespace eitc {

inline Eigen::VectorXd vec_rowmajor(const Eigen::MatrixXd& m) {
    Eigen::VectorXd v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v[k++] = m(i, j);
    return v;
}

inline Eigen::MatrixXd unvec_rowmajor(const Eigen::VectorXd& v, Eigen::Index rows,
                                      Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[k++];
    return m;
}

} // namespace eitc
