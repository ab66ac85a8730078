// Evaluation metrics: relative Frobenius error of completed measurement
// tables, conductivity errors restricted to the disk-interior grid, SSIM, and
// report assembly across methods.
#pragma once

#include "eitc/phantoms.hpp"

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace eitc {

/// ||estimate - truth||_F / ||truth||_F.
double re_frobenius(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

struct ConductivityErrors {
    double re = 0.0;
    double mae = 0.0;
};

/// Relative l2 and mean absolute error over the grid points with
/// x_i^2 + y_j^2 <= 1 only; pixels outside never contribute.
ConductivityErrors conductivity_errors(const GridImage& gamma_hat, const GridImage& gamma);

/// Mean local SSIM over all fully-contained sliding windows (uniform window,
/// odd size). C1 and C2 are passed explicitly; the report layer derives them
/// as (0.01 L)^2 and (0.03 L)^2 from the truth image's data range.
double ssim(const GridImage& a, const GridImage& b, int window, double c1, double c2);

/// Convenience wrapper with the documented defaults (7x7 window, L = data
/// range of `truth`).
double ssim_default(const GridImage& estimate, const GridImage& truth);

struct MethodMetrics {
    std::string method;
    double rate = 0.0; // overall observation rate of the method's masks
    double ssim = 0.0;
    double re = 0.0;
    double mae = 0.0;
    int n_samples = 0;
};

struct EvaluationReport {
    std::vector<MethodMetrics> rows;
    std::vector<std::string> missing; // methods with no outputs present
    std::string to_csv() const;       // schema: method,rate,ssim,re,mae
    std::string to_table() const;     // aligned text table
};

/// Per-method means over a split of per-sample (ssim, re, mae) triples.
EvaluationReport evaluation_report(
    const std::vector<std::string>& methods,
    const std::map<std::string, std::vector<ConductivityErrors>>& cond_errors,
    const std::map<std::string, std::vector<double>>& ssims,
    const std::map<std::string, double>& rates);

} // namespace eitc
