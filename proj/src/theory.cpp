#include "eitc/theory.hpp"

#include "eitc/vecmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eitc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double point_segment_distance(double px, double py, const Vec2& a, const Vec2& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::hypot(dx, dy);
}

double point_chain_distance(double px, double py, const PolygonSpec& poly) {
    const int n = poly.n_vertices();
    double best = 1e300;
    for (int i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(px, py, poly.vertices[i],
                                                     poly.vertices[(i + 1) % n]));
    return best;
}

// sup over x in boundary(a) of dist(x, boundary(b)): vertices plus dense
// samples on every edge (point-to-chain distances are exact; sampling only
// under-resolves the sup, never inflates it).
double directed_hausdorff(const PolygonSpec& a, const PolygonSpec& b) {
    const int samples_per_edge = 256;
    const int n = a.n_vertices();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = a.vertices[i];
        const Vec2& q = a.vertices[(i + 1) % n];
        for (int s = 0; s <= samples_per_edge; ++s) {
            const double t = double(s) / samples_per_edge;
            worst = std::max(worst,
                             point_chain_distance(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), b));
        }
    }
    return worst;
}

} // namespace

double polygon_boundary_hausdorff(const PolygonSpec& a, const PolygonSpec& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

BoundCheck hausdorff_poly_bound(const PolygonSpec& v, const PolygonSpec& w) {
    if (!v.is_simple() || !w.is_simple())
        throw std::invalid_argument("hausdorff_poly_bound: input polygon is not simple");
    if (v.n_vertices() != w.n_vertices())
        throw std::invalid_argument("hausdorff_poly_bound: vertex counts differ");
    BoundCheck res;
    res.value = polygon_boundary_hausdorff(v, w);
    res.bound = PolygonSpec::poly_distance(v, w);
    res.pass = res.value <= res.bound + 1e-9;
    return res;
}

namespace {

// Sutherland-Hodgman clip of convex subject against convex clip polygon.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
    std::vector<Vec2> poly = subject;
    const int nc = int(clip.size());
    for (int i = 0; i < nc && !poly.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % nc];
        auto inside = [&](const Vec2& p) {
            return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0;
        };
        auto intersect = [&](const Vec2& p, const Vec2& q) {
            const double a1 = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            const double a2 = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
            const double t = a1 / (a1 - a2);
            return Vec2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        };
        std::vector<Vec2> out;
        const int np = int(poly.size());
        for (int j = 0; j < np; ++j) {
            const Vec2& cur = poly[j];
            const Vec2& nxt = poly[(j + 1) % np];
            const bool cin = inside(cur), nin = inside(nxt);
            if (cin) out.push_back(cur);
            if (cin != nin) out.push_back(intersect(cur, nxt));
        }
        poly = std::move(out);
    }
    return poly;
}

double polygon_area(const std::vector<Vec2>& poly) {
    const int n = int(poly.size());
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(a);
}

} // namespace

double convex_symdiff_area(const PolygonSpec& a, const PolygonSpec& b) {
    const double area_a = std::abs(a.signed_area());
    const double area_b = std::abs(b.signed_area());
    const double inter = polygon_area(clip_convex(a.vertices, b.vertices));
    return area_a + area_b - 2.0 * inter;
}

BoundCheck symdiff_bound(const PolygonSpec& v, const PolygonSpec& w) {
    if (v.n_vertices() != w.n_vertices())
        throw std::invalid_argument("symdiff_bound: vertex counts differ");
    const double diam_omega = 2.0; // unit disk
    const double delta = PolygonSpec::poly_distance(v, w);
    BoundCheck res;
    res.value = convex_symdiff_area(v, w);
    res.bound = 2.0 * v.n_vertices() * (kPi + 1.0) * diam_omega * delta;
    res.pass = res.value <= res.bound + 1e-9;
    return res;
}

Eigen::VectorXd measurement_map(const TriMesh& mesh, const PolygonSpec& polygon) {
    const ConductivityField gamma = polygon_conductivity(polygon, mesh);
    const DtNMatrix dtn = dtn_matrix(mesh, gamma, /*parallel=*/false);
    return vec_rowmajor(dtn.values) / std::sqrt(double(mesh.n_boundary()));
}

LipschitzReport empirical_lipschitz(const TriMesh& mesh, const PolygonSpec& base_polygon,
                                    int n_probes, double step, const PolygonClassParams& params,
                                    std::uint64_t seed, bool parallel) {
    if (!(step > 0.0)) throw std::invalid_argument("empirical_lipschitz: step must be > 0");
    if (!polygon_admissible(base_polygon, params, false).admissible)
        throw std::invalid_argument("empirical_lipschitz: base polygon must be admissible");

    // Perturbations drawn up front (host thread) for worker-count-independent
    // results; each probe then costs one forward solve.
    Rng rng(seed);
    std::vector<PolygonSpec> probes;
    LipschitzReport rep;
    for (int p = 0; p < n_probes; ++p) {
        PolygonSpec cand = base_polygon;
        for (auto& vtx : cand.vertices) {
            const double ang = rng.uniform(0.0, 2.0 * kPi);
            vtx.x += step * std::cos(ang);
            vtx.y += step * std::sin(ang);
        }
        if (polygon_admissible(cand, params, true).admissible) probes.push_back(cand);
        else rep.probes_skipped++;
    }

    const Eigen::VectorXd f_base = measurement_map(mesh, base_polygon);
    const int np = int(probes.size());
    rep.ratios.assign(np, 0.0);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int p = 0; p < np; ++p) {
        const Eigen::VectorXd f = measurement_map(mesh, probes[p]);
        double dv2 = 0.0;
        for (int i = 0; i < base_polygon.n_vertices(); ++i) {
            const double dx = probes[p].vertices[i].x - base_polygon.vertices[i].x;
            const double dy = probes[p].vertices[i].y - base_polygon.vertices[i].y;
            dv2 += dx * dx + dy * dy;
        }
        rep.ratios[p] = (f - f_base).norm() / std::sqrt(dv2);
    }
    rep.probes_used = np;
    for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
    return rep;
}

CoveringReport covering_estimate(const std::vector<Eigen::VectorXd>& sample_set,
                                 const std::vector<double>& eps_list) {
    CoveringReport rep;
    const int n = int(sample_set.size());
    for (double eps : eps_list) {
        // Greedy net in input order: a point joins the net when no existing
        // center is within eps.
        std::vector<int> net;
        for (int i = 0; i < n; ++i) {
            bool covered = false;
            for (int c : net)
                if ((sample_set[i] - sample_set[c]).norm() <= eps) {
                    covered = true;
                    break;
                }
            if (!covered) net.push_back(i);
        }
        rep.eps.push_back(eps);
        rep.counts.push_back(int(net.size()));
    }
    // Slope of log N vs log(1/eps) on the resolvable mid range.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (size_t k = 0; k < rep.eps.size(); ++k) {
        if (rep.counts[k] <= 1 || rep.counts[k] >= int(0.9 * n)) continue;
        const double x = std::log(1.0 / rep.eps[k]);
        const double y = std::log(double(rep.counts[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    rep.fit_points = m;
    rep.fitted_slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return rep;
}

} // namespace eitc
