// Conductivity phantoms: the Disks distribution (random circular inclusions
// on a unit background), the admissible polygon class with its relaxed
// variant, and rasterization of mesh fields to a Cartesian grid.
#pragma once

#include "eitc/fem.hpp"
#include "eitc/mesh.hpp"
#include "eitc/rng.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace eitc {

/// Random circular inclusions: gamma(x) = 1 + sum_i (c_i - 1) 1{|x - x_i| <= r_i}.
struct DiskPhantomSpec {
    std::vector<Vec2> centers;
    std::vector<double> radii;     // U[0.2, 0.4]
    std::vector<double> contrasts; // U[2, 8]

    int n_inclusions() const { return int(centers.size()); }
    /// Containment (dist to the boundary circle > r_i) and pairwise
    /// disjointness; empty string when satisfied.
    std::string check_invariants() const;
    double evaluate(double x, double y) const;
};

/// Draw a feasible spec by whole-tuple rejection; deterministic per seed.
DiskPhantomSpec sample_disks(std::uint64_t rng_seed, int n_inclusions,
                             int max_attempts = 100000);

ConductivityField to_conductivity(const DiskPhantomSpec& spec, const TriMesh& mesh);

/// Counterclockwise polygon given by its vertex list.
struct PolygonSpec {
    std::vector<Vec2> vertices;
    double contrast = 4.0; // kappa

    int n_vertices() const { return int(vertices.size()); }
    double signed_area() const;
    bool is_simple() const;
    /// Interior angle at vertex i (pi - turn angle); > pi at reflex vertices.
    double interior_angle(int i) const;
    bool contains(double x, double y) const;
    /// max over vertices of |v_i - w_i| (the polygon norm of the difference).
    static double poly_distance(const PolygonSpec& v, const PolygonSpec& w);
};

/// Class parameters (d0, d1, beta0) of the admissible polygon class.
struct PolygonClassParams {
    double d0 = 0.2;                   // distance to the boundary circle
    double d1 = 0.3;                   // minimum side length
    double beta0 = 0.5235987755982988; // pi/6, interior angle margin
};

struct AdmissibleResult {
    bool admissible = false;
    std::string violated; // "", "not-simple", "A1", "A2", "A3" (primed when relaxed)
};

/// Check (A1)-(A3), or the relaxed (A1')-(A3') with halved parameters and
/// strict inequalities. Reports the first violated condition.
AdmissibleResult polygon_admissible(const PolygonSpec& spec, const PolygonClassParams& params,
                                    bool relaxed);

/// gamma_P = 1 + (kappa - 1) * indicator(P), sampled at element centroids.
ConductivityField polygon_conductivity(const PolygonSpec& spec, const TriMesh& mesh);

/// Rejection-sample a polygon from the admissible class (vertices uniform in
/// the concentric disk of radius 1 - d0, sorted by angle).
std::optional<PolygonSpec> sample_admissible_polygon(Rng& rng, int n_vertices,
                                                     const PolygonClassParams& params,
                                                     double contrast = 4.0,
                                                     int max_attempts = 100000);

/// Square grid of conductivity values over [-1,1]^2, exactly zero outside the
/// unit disk. Grid coordinates are x_i = -1 + 2i/(size-1), row-major with x
/// varying fastest.
struct GridImage {
    int size = 0;
    Eigen::VectorXd values; // size*size, index j*size + i for (x_i, y_j)

    double& at(int i, int j) { return values[j * size + i]; }
    double at(int i, int j) const { return values[j * size + i]; }
    static double coord(int i, int size) { return -1.0 + 2.0 * i / (size - 1); }
};

/// Nodal averaging of element values followed by barycentric interpolation;
/// grid points inside the disk but outside the mesh polygon take the value of
/// the nearest boundary point.
GridImage rasterize(const TriMesh& mesh, const ConductivityField& gamma, int grid_size = 128);

} // namespace eitc
