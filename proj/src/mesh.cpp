#include "eitc/mesh.hpp"

#include "eitc/io_util.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace eitc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

int default_ring_count(int n_boundary) {
    // Radial spacing 1/n_rings matched to the boundary spacing 2*pi/N_B,
    // nudged up so N_B=128 lands in the reference resolution class.
    int r = int(std::lround(n_boundary * 11.0 / 64.0));
    return r < 2 ? 2 : r;
}

TriMesh build_disk_mesh(int n_boundary, int n_rings) {
    if (n_boundary < 8) throw std::invalid_argument("build_disk_mesh: n_boundary must be >= 8");
    if (n_rings < 2) throw std::invalid_argument("build_disk_mesh: n_rings must be >= 2");

    TriMesh mesh;
    // Ring j of n_rings sits at radius j/n_rings and carries round(N_B*j/n_rings)
    // nodes (at least 3); ring 0 is the center point.
    std::vector<std::vector<std::uint32_t>> ring_ids(n_rings + 1);
    mesh.vertices.push_back({0.0, 0.0});
    ring_ids[0].push_back(0);
    for (int j = 1; j <= n_rings; ++j) {
        int count = (j == n_rings) ? n_boundary
                                   : int(std::lround(double(n_boundary) * j / n_rings));
        if (count < 3) count = 3;
        const double radius = double(j) / n_rings;
        for (int k = 0; k < count; ++k) {
            const double theta = kTwoPi * k / count;
            ring_ids[j].push_back(std::uint32_t(mesh.vertices.size()));
            if (j == n_rings) {
                // Boundary nodes exactly on the unit circle.
                mesh.vertices.push_back({std::cos(theta), std::sin(theta)});
            } else {
                mesh.vertices.push_back({radius * std::cos(theta), radius * std::sin(theta)});
            }
        }
    }

    auto add_tri = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        mesh.triangles.push_back({a, b, c});
        if (mesh.signed_area(mesh.n_triangles() - 1) <= 0.0) {
            std::swap(mesh.triangles.back()[1], mesh.triangles.back()[2]);
        }
    };

    // Center fan.
    {
        const auto& r1 = ring_ids[1];
        const int n1 = int(r1.size());
        for (int k = 0; k < n1; ++k) add_tri(0, r1[k], r1[(k + 1) % n1]);
    }

    // Strip between consecutive rings: advance along whichever ring has the
    // smaller next angle, keeping triangles counterclockwise.
    for (int j = 1; j < n_rings; ++j) {
        const auto& inner = ring_ids[j];
        const auto& outer = ring_ids[j + 1];
        const int ni = int(inner.size()), no = int(outer.size());
        int i = 0, o = 0;
        auto angle = [&](int k, int n) { return kTwoPi * k / n; };
        while (i < ni || o < no) {
            const double next_i = (i < ni) ? angle(i + 1, ni) : 1e30;
            const double next_o = (o < no) ? angle(o + 1, no) : 1e30;
            if (next_o <= next_i) {
                add_tri(outer[o % no], outer[(o + 1) % no], inner[i % ni]);
                ++o;
            } else {
                add_tri(inner[(i + 1) % ni], inner[i % ni], outer[o % no]);
                ++i;
            }
        }
    }

    mesh.boundary_idx = ring_ids[n_rings];
    std::vector<char> is_boundary(mesh.vertices.size(), 0);
    for (auto b : mesh.boundary_idx) is_boundary[b] = 1;
    for (std::uint32_t v = 0; v < mesh.vertices.size(); ++v)
        if (!is_boundary[v]) mesh.interior_idx.push_back(v);

    const std::string err = mesh.validate();
    if (!err.empty()) throw std::runtime_error("build_disk_mesh: " + err);
    return mesh;
}

std::string TriMesh::validate() const {
    const int nv = n_vertices();
    if (nv == 0) return "empty mesh";
    for (auto b : boundary_idx) {
        const double r = std::hypot(vertices[b].x, vertices[b].y);
        if (std::abs(r - 1.0) > 1e-12) return "boundary vertex off the unit circle";
    }
    std::vector<char> seen(nv, 0);
    for (auto b : boundary_idx) {
        if (b >= std::uint32_t(nv) || seen[b]) return "duplicate/out-of-range boundary index";
        seen[b] = 2;
    }
    for (auto i : interior_idx) {
        if (i >= std::uint32_t(nv) || seen[i]) return "interior/boundary sets overlap";
        seen[i] = 1;
    }
    for (int v = 0; v < nv; ++v)
        if (!seen[v]) return "vertex in neither index set";

    for (int t = 0; t < n_triangles(); ++t) {
        for (auto v : triangles[t])
            if (v >= std::uint32_t(nv)) return "triangle vertex out of range";
        if (signed_area(t) <= 0.0) return "nonpositive triangle area";
    }

    // Boundary edges (b_k, b_{k+1}) must each belong to exactly one triangle,
    // interior edges to exactly two: the cycle is then a closed simple walk
    // around a watertight disk.
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_count;
    auto key = [](std::uint32_t a, std::uint32_t b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    for (const auto& tri : triangles)
        for (int e = 0; e < 3; ++e) edge_count[key(tri[e], tri[(e + 1) % 3])]++;
    const int nb = n_boundary();
    for (int k = 0; k < nb; ++k) {
        auto it = edge_count.find(key(boundary_idx[k], boundary_idx[(k + 1) % nb]));
        if (it == edge_count.end() || it->second != 1) return "boundary_idx is not a closed boundary cycle";
    }
    for (const auto& [e, c] : edge_count)
        if (c > 2) return "non-manifold edge";
    return {};
}

namespace {
constexpr char kMeshMagic[8] = {'E', 'I', 'T', 'M', 'E', 'S', 'H', '1'};
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
    BinaryWriter w(path);
    w.write_bytes(kMeshMagic, 8);
    w.write_u32(std::uint32_t(mesh.vertices.size()));
    w.write_u32(std::uint32_t(mesh.triangles.size()));
    w.write_u32(std::uint32_t(mesh.boundary_idx.size()));
    for (const auto& v : mesh.vertices) {
        w.write_f64(v.x);
        w.write_f64(v.y);
    }
    for (const auto& t : mesh.triangles)
        for (auto i : t) w.write_u32(i);
    for (auto b : mesh.boundary_idx) w.write_u32(b);
}

TriMesh load_mesh(const std::string& path) {
    BinaryReader r(path);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::memcmp(magic, kMeshMagic, 8) != 0)
        throw std::runtime_error("load_mesh: " + path + " is not a mesh file");
    TriMesh mesh;
    const std::uint32_t nv = r.read_u32();
    const std::uint32_t nt = r.read_u32();
    const std::uint32_t nb = r.read_u32();
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        v.x = r.read_f64();
        v.y = r.read_f64();
    }
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles)
        for (auto& i : t) i = r.read_u32();
    mesh.boundary_idx.resize(nb);
    for (auto& b : mesh.boundary_idx) b = r.read_u32();
    std::vector<char> is_boundary(nv, 0);
    for (auto b : mesh.boundary_idx) is_boundary[b] = 1;
    for (std::uint32_t v = 0; v < nv; ++v)
        if (!is_boundary[v]) mesh.interior_idx.push_back(v);
    const std::string err = mesh.validate();
    if (!err.empty()) throw std::runtime_error("load_mesh: " + err);
    return mesh;
}

} // namespace eitc
