#include "eitc/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eitc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string DiskPhantomSpec::check_invariants() const {
    const int n = n_inclusions();
    for (int i = 0; i < n; ++i) {
        const double d_boundary = 1.0 - std::hypot(centers[i].x, centers[i].y);
        if (!(d_boundary > radii[i])) return "inclusion touches the boundary";
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::hypot(centers[i].x - centers[j].x, centers[i].y - centers[j].y);
            if (!(d > radii[i] + radii[j])) return "inclusions overlap";
        }
    return {};
}

double DiskPhantomSpec::evaluate(double x, double y) const {
    double v = 1.0;
    for (int i = 0; i < n_inclusions(); ++i) {
        const double dx = x - centers[i].x, dy = y - centers[i].y;
        if (dx * dx + dy * dy <= radii[i] * radii[i]) // closed disk
            v += contrasts[i] - 1.0;
    }
    return v;
}

DiskPhantomSpec sample_disks(std::uint64_t rng_seed, int n_inclusions, int max_attempts) {
    if (n_inclusions < 2 || n_inclusions > 5)
        throw std::invalid_argument("sample_disks: n_inclusions must be in 2..5");
    Rng rng(rng_seed);
    // Radii and contrasts are drawn up front; centers are rejection-sampled
    // until each inclusion is contained and disjoint from the ones already
    // placed. A radius set whose placement fails within its budget is
    // redrawn, so only geometric crowding biases the radius law.
    int attempts = 0;
    while (attempts < max_attempts) {
        DiskPhantomSpec spec;
        for (int i = 0; i < n_inclusions; ++i) {
            spec.radii.push_back(rng.uniform(0.2, 0.4));
            spec.contrasts.push_back(rng.uniform(2.0, 8.0));
        }
        bool ok = true;
        for (int i = 0; i < n_inclusions && ok; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 2000 && attempts < max_attempts; ++tries) {
                ++attempts;
                // Center uniform on the disk.
                const double r = std::sqrt(rng.uniform());
                const double a = rng.uniform(0.0, 2.0 * kPi);
                const Vec2 center{r * std::cos(a), r * std::sin(a)};
                if (1.0 - std::hypot(center.x, center.y) <= spec.radii[i]) continue;
                bool disjoint = true;
                for (int j = 0; j < i; ++j) {
                    const double d = std::hypot(center.x - spec.centers[j].x,
                                                center.y - spec.centers[j].y);
                    if (d <= spec.radii[i] + spec.radii[j]) {
                        disjoint = false;
                        break;
                    }
                }
                if (!disjoint) continue;
                spec.centers.push_back(center);
                placed = true;
                break;
            }
            ok = placed;
        }
        if (ok) return spec;
    }
    throw std::runtime_error("sample_disks: rejection cap exceeded (infeasible draw)");
}

ConductivityField to_conductivity(const DiskPhantomSpec& spec, const TriMesh& mesh) {
    ConductivityField field;
    field.values.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 c = mesh.centroid(t);
        field.values[t] = spec.evaluate(c.x, c.y);
    }
    return field;
}

double PolygonSpec::signed_area() const {
    const int n = n_vertices();
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = vertices[i];
        const Vec2& q = vertices[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
           std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, p1, q2)) return true;
    if (d2 == 0 && on_segment(q1, p2, q2)) return true;
    if (d3 == 0 && on_segment(p1, q1, p2)) return true;
    if (d4 == 0 && on_segment(p1, q2, p2)) return true;
    return false;
}

} // namespace

bool PolygonSpec::is_simple() const {
    const int n = n_vertices();
    if (n < 3) return false;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            const Vec2& c = vertices[j];
            const Vec2& d = vertices[(j + 1) % n];
            // Skip pairs sharing an endpoint; shared-vertex overlap shows up
            // through the angle checks instead.
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(a, b, c, d)) return false;
        }
    // Distinct consecutive vertices.
    for (int i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        if (a.x == b.x && a.y == b.y) return false;
    }
    return true;
}

double PolygonSpec::interior_angle(int i) const {
    const int n = n_vertices();
    const Vec2& prev = vertices[(i + n - 1) % n];
    const Vec2& cur = vertices[i];
    const Vec2& next = vertices[(i + 1) % n];
    const double ex0 = cur.x - prev.x, ey0 = cur.y - prev.y;
    const double ex1 = next.x - cur.x, ey1 = next.y - cur.y;
    const double turn = std::atan2(ex0 * ey1 - ey0 * ex1, ex0 * ex1 + ey0 * ey1);
    return kPi - turn; // counterclockwise convention
}

bool PolygonSpec::contains(double x, double y) const {
    // Even-odd ray crossing; boundary points count as inside.
    const int n = n_vertices();
    bool inside = false;
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[j];
        const double cr = (b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y);
        if (cr == 0.0 && std::min(a.x, b.x) <= x && x <= std::max(a.x, b.x) &&
            std::min(a.y, b.y) <= y && y <= std::max(a.y, b.y))
            return true;
        if ((a.y > y) != (b.y > y) && x < a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y))
            inside = !inside;
    }
    return inside;
}

double PolygonSpec::poly_distance(const PolygonSpec& v, const PolygonSpec& w) {
    if (v.n_vertices() != w.n_vertices())
        throw std::invalid_argument("poly_distance: vertex counts differ");
    double d = 0.0;
    for (int i = 0; i < v.n_vertices(); ++i)
        d = std::max(d, std::hypot(v.vertices[i].x - w.vertices[i].x,
                                   v.vertices[i].y - w.vertices[i].y));
    return d;
}

AdmissibleResult polygon_admissible(const PolygonSpec& spec, const PolygonClassParams& params,
                                    bool relaxed) {
    AdmissibleResult res;
    if (spec.n_vertices() < 3) {
        res.violated = "not-simple";
        return res;
    }
    if (!spec.is_simple() || spec.signed_area() <= 0.0) {
        res.violated = "not-simple";
        return res;
    }
    // A1: P inside the disk with margin d0 (the farthest point of any polygon
    // from the origin is one of its vertices).
    double max_norm = 0.0;
    for (const auto& v : spec.vertices) max_norm = std::max(max_norm, std::hypot(v.x, v.y));
    const double dist_boundary = 1.0 - max_norm;
    if (relaxed ? !(dist_boundary > params.d0 / 2.0) : !(dist_boundary >= params.d0)) {
        res.violated = relaxed ? "A1'" : "A1";
        return res;
    }
    // A2: side lengths.
    const int n = spec.n_vertices();
    for (int i = 0; i < n; ++i) {
        const Vec2& a = spec.vertices[i];
        const Vec2& b = spec.vertices[(i + 1) % n];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (relaxed ? !(len > params.d1 / 2.0) : !(len >= params.d1)) {
            res.violated = relaxed ? "A2'" : "A2";
            return res;
        }
    }
    // A3: interior angles.
    for (int i = 0; i < n; ++i) {
        const double beta = spec.interior_angle(i);
        const bool ok = relaxed ? (beta > params.beta0 / 2.0 && beta < kPi - params.beta0 / 2.0)
                                : (beta >= params.beta0 && beta <= kPi - params.beta0);
        if (!ok) {
            res.violated = relaxed ? "A3'" : "A3";
            return res;
        }
    }
    res.admissible = true;
    return res;
}

ConductivityField polygon_conductivity(const PolygonSpec& spec, const TriMesh& mesh) {
    ConductivityField field;
    field.values.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 c = mesh.centroid(t);
        field.values[t] = spec.contains(c.x, c.y) ? spec.contrast : 1.0;
    }
    return field;
}

std::optional<PolygonSpec> sample_admissible_polygon(Rng& rng, int n_vertices,
                                                     const PolygonClassParams& params,
                                                     double contrast, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::pair<double, Vec2>> pts;
        for (int i = 0; i < n_vertices; ++i) {
            const double r = (1.0 - params.d0) * std::sqrt(rng.uniform());
            const double a = rng.uniform(0.0, 2.0 * kPi);
            pts.push_back({a, {r * std::cos(a), r * std::sin(a)}});
        }
        std::sort(pts.begin(), pts.end(),
                  [](const auto& p, const auto& q) { return p.first < q.first; });
        PolygonSpec spec;
        spec.contrast = contrast;
        for (const auto& [_, v] : pts) spec.vertices.push_back(v);
        if (polygon_admissible(spec, params, false).admissible) return spec;
    }
    return std::nullopt;
}

GridImage rasterize(const TriMesh& mesh, const ConductivityField& gamma, int grid_size) {
    if (gamma.values.size() != mesh.n_triangles())
        throw std::invalid_argument("rasterize: gamma length must equal triangle count");

    // Area-weighted nodal averages of the element values.
    const int nv = mesh.n_vertices();
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(nv);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double a = mesh.signed_area(t);
        for (auto v : mesh.triangles[t]) {
            nodal[v] += a * gamma.values[t];
            weight[v] += a;
        }
    }
    for (int v = 0; v < nv; ++v) nodal[v] /= weight[v];

    // Triangle lookup grid over the bounding square.
    const int cells = 64;
    std::vector<std::vector<int>> bucket(cells * cells);
    auto cell_of = [&](double x) {
        int c = int((x + 1.0) * 0.5 * cells);
        return std::clamp(c, 0, cells - 1);
    };
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double xmin = 1e30, xmax = -1e30, ymin = 1e30, ymax = -1e30;
        for (auto v : mesh.triangles[t]) {
            xmin = std::min(xmin, mesh.vertices[v].x);
            xmax = std::max(xmax, mesh.vertices[v].x);
            ymin = std::min(ymin, mesh.vertices[v].y);
            ymax = std::max(ymax, mesh.vertices[v].y);
        }
        for (int cy = cell_of(ymin); cy <= cell_of(ymax); ++cy)
            for (int cx = cell_of(xmin); cx <= cell_of(xmax); ++cx)
                bucket[cy * cells + cx].push_back(t);
    }

    auto barycentric_value = [&](int t, double x, double y) {
        const auto& tri = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
        const double l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
        const double l0 = 1.0 - l1 - l2;
        return std::array<double, 4>{l0, l1, l2,
                                     l0 * nodal[tri[0]] + l1 * nodal[tri[1]] + l2 * nodal[tri[2]]};
    };

    GridImage img;
    img.size = grid_size;
    img.values = Eigen::VectorXd::Zero(grid_size * grid_size);
    for (int j = 0; j < grid_size; ++j) {
        const double y = GridImage::coord(j, grid_size);
        for (int i = 0; i < grid_size; ++i) {
            const double x = GridImage::coord(i, grid_size);
            if (x * x + y * y > 1.0) continue; // exact zero outside the disk
            int found = -1;
            double best_slack = -1e30;
            int best_tri = -1;
            for (int t : bucket[cell_of(y) * cells + cell_of(x)]) {
                const auto bl = barycentric_value(t, x, y);
                const double slack = std::min({bl[0], bl[1], bl[2]});
                if (slack >= -1e-12) {
                    found = t;
                    break;
                }
                if (slack > best_slack) {
                    best_slack = slack;
                    best_tri = t;
                }
            }
            if (found >= 0) {
                img.at(i, j) = barycentric_value(found, x, y)[3];
            } else {
                // Inside the disk but outside the mesh polygon (or bucket
                // crumbs near edges): pull to the closest boundary point.
                double px = x, py = y;
                if (best_tri < 0) {
                    const double r = std::hypot(x, y);
                    const double shrink = (1.0 - 1e-9) / r;
                    px = x * shrink;
                    py = y * shrink;
                    // Walk inward until a containing triangle shows up.
                    for (int iter = 0; iter < 60 && best_tri < 0; ++iter) {
                        for (int t : bucket[cell_of(py) * cells + cell_of(px)]) {
                            const auto bl = barycentric_value(t, px, py);
                            if (std::min({bl[0], bl[1], bl[2]}) >= -1e-12) {
                                best_tri = t;
                                break;
                            }
                        }
                        px *= 0.999;
                        py *= 0.999;
                    }
                }
                if (best_tri < 0) continue; // unreachable for valid meshes
                auto bl = barycentric_value(best_tri, px, py);
                // Clamp to the triangle and renormalize.
                double l0 = std::max(0.0, bl[0]), l1 = std::max(0.0, bl[1]), l2 = std::max(0.0, bl[2]);
                const double s = l0 + l1 + l2;
                const auto& tri = mesh.triangles[best_tri];
                img.at(i, j) = (l0 * nodal[tri[0]] + l1 * nodal[tri[1]] + l2 * nodal[tri[2]]) / s;
            }
        }
    }
    return img;
}

} // namespace eitc
