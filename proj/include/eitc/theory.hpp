// Numeric checks of the geometric stability statements for polygonal
// conductivities: Hausdorff boundary perturbation, L1 symmetric-difference
// stability, empirical Lipschitz constants of the discretized measurement
// map, and greedy covering-number estimates.
#pragma once

#include "eitc/phantoms.hpp"

#include <Eigen/Dense>
#include <vector>

namespace eitc {

struct BoundCheck {
    double value = 0.0; // measured left-hand side
    double bound = 0.0; // right-hand side
    bool pass = false;
};

/// d_H(boundary P(v), boundary P(w)) <= ||v - w||_poly (+ 1e-9 slack).
/// Exact point-to-segment distances on segment samples plus all vertices.
BoundCheck hausdorff_poly_bound(const PolygonSpec& v, const PolygonSpec& w);

/// |P(v) delta P(w)| <= 2 n_v (pi + 1) diam(Omega) * ||v - w||_poly, area by
/// convex polygon clipping.
BoundCheck symdiff_bound(const PolygonSpec& v, const PolygonSpec& w);

/// Hausdorff distance between the boundary polylines.
double polygon_boundary_hausdorff(const PolygonSpec& a, const PolygonSpec& b);

/// Area of the symmetric difference of two convex polygons.
double convex_symdiff_area(const PolygonSpec& a, const PolygonSpec& b);

/// Discretized measurement map F_N(gamma) = vec(Lambda_gamma)/sqrt(N_B).
Eigen::VectorXd measurement_map(const TriMesh& mesh, const PolygonSpec& polygon);

struct LipschitzReport {
    double max_ratio = 0.0;
    int probes_used = 0;
    int probes_skipped = 0; // probes that left the relaxed class
    std::vector<double> ratios;
};

/// Finite-difference Lipschitz probe of v -> F_N(gamma_P(v)) around a base
/// polygon: vertices perturbed by `step` in random directions, ratios
/// ||F(v') - F(v)||_2 / ||v' - v||_2.
LipschitzReport empirical_lipschitz(const TriMesh& mesh, const PolygonSpec& base_polygon,
                                    int n_probes, double step,
                                    const PolygonClassParams& params, std::uint64_t seed,
                                    bool parallel = true);

struct CoveringReport {
    std::vector<double> eps;
    std::vector<int> counts; // greedy net sizes
    double fitted_slope = 0.0;
    int fit_points = 0; // points inside the resolvable range used for the fit
};

/// Greedy epsilon-net sizes of a point cloud for each radius, plus the least
/// squares slope of log N vs log(1/eps) away from the saturation regions.
CoveringReport covering_estimate(const std::vector<Eigen::VectorXd>& sample_set,
                                 const std::vector<double>& eps_list);

} // namespace eitc
