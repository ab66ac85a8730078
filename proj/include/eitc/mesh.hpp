// Triangulation of the unit disk with explicit interior/boundary index sets.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace eitc {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// P1 triangle mesh of the unit disk. Boundary nodes lie exactly on the unit
/// circle; triangles are counterclockwise; boundary_idx walks the boundary
/// once counterclockwise.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<std::uint32_t> boundary_idx;
    std::vector<std::uint32_t> interior_idx;

    int n_vertices() const { return int(vertices.size()); }
    int n_triangles() const { return int(triangles.size()); }
    int n_boundary() const { return int(boundary_idx.size()); }
    int n_interior() const { return int(interior_idx.size()); }

    double signed_area(int t) const {
        const Vec2& a = vertices[triangles[t][0]];
        const Vec2& b = vertices[triangles[t][1]];
        const Vec2& c = vertices[triangles[t][2]];
        return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    }

    Vec2 centroid(int t) const {
        const Vec2& a = vertices[triangles[t][0]];
        const Vec2& b = vertices[triangles[t][1]];
        const Vec2& c = vertices[triangles[t][2]];
        return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    }

    /// Machine-check all structural invariants; returns an empty string when
    /// the mesh is valid, otherwise a description of the first violation.
    std::string validate() const;
};

/// Concentric-ring triangulation with exactly n_boundary nodes at angles
/// 2*pi*k/n_boundary on the unit circle and per-ring node counts proportional
/// to the ring radius. Requires n_boundary >= 8 and n_rings >= 2.
TriMesh build_disk_mesh(int n_boundary, int n_rings);

/// Ring count that roughly equilateralizes triangles and reproduces the
/// reference resolution (N_B=128 -> N_I about 1.3k, about 2.8k elements).
int default_ring_count(int n_boundary);

void save_mesh(const TriMesh& mesh, const std::string& path);
TriMesh load_mesh(const std::string& path);

} // namespace eitc
