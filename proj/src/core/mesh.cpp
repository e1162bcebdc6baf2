#include "core/mesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace facetflow {

double Mesh::total_area() const {
    double s = 0.0;
    for (double a : area) s += a;
    return s;
}

double Mesh::diameter() const {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& v : vertices) {
        lo_x = std::min(lo_x, v.x());
        hi_x = std::max(hi_x, v.x());
        lo_y = std::min(lo_y, v.y());
        hi_y = std::max(hi_y, v.y());
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

namespace {

void finalize(Mesh& mesh) {
    const int nt = mesh.num_triangles();
    mesh.area.resize(nt);
    mesh.basis_grad.resize(nt);
    mesh.centroid.resize(nt);
    mesh.lumped.assign(mesh.vertices.size(), 0.0);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 a = mesh.vertices[tri[0]];
        const Vec2 b = mesh.vertices[tri[1]];
        const Vec2 c = mesh.vertices[tri[2]];
        const Vec2 d1 = b - a, d2 = c - a;
        const double det = d1.x() * d2.y() - d1.y() * d2.x();
        if (!(det > 0.0)) throw std::runtime_error("mesh: non-positive triangle orientation");
        mesh.area[t] = 0.5 * det;
        mesh.basis_grad[t][0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
        mesh.basis_grad[t][1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
        mesh.basis_grad[t][2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
        mesh.centroid[t] = (a + b + c) / 3.0;
        for (int k = 0; k < 3; ++k) mesh.lumped[tri[k]] += mesh.area[t] / 3.0;
    }
}

void mark_boundary_from_edges(Mesh& mesh) {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    mesh.boundary.assign(mesh.vertices.size(), false);
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            mesh.boundary[edge.first] = true;
            mesh.boundary[edge.second] = true;
        } else if (count != 2) {
            throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }
}

}  // namespace

Mesh make_rectangle(double x0, double y0, double x1, double y1, int nx, int ny) {
    if (!(x1 > x0 && y1 > y0) || nx < 1 || ny < 1)
        throw std::invalid_argument("make_rectangle: bad extents or resolution");
    Mesh mesh;
    mesh.spec = MeshSpec{"rectangle", x0, y0, x1, y1, 0.0, nx, ny};
    const double hx = (x1 - x0) / nx, hy = (y1 - y0) / ny;
    mesh.h = std::max(hx, hy);
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(x0 + i * hx, y0 + j * hy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    mark_boundary_from_edges(mesh);
    finalize(mesh);
    return mesh;
}

Mesh make_disk(double radius, int ncell) {
    if (!(radius > 0.0) || ncell < 4) throw std::invalid_argument("make_disk: bad radius or resolution");
    Mesh mesh;
    mesh.spec = MeshSpec{"disk", 0, 0, 0, 0, radius, ncell, ncell};
    const double h = 2.0 * radius / ncell;
    mesh.h = h;
    std::vector<int> vid(static_cast<size_t>(ncell + 1) * (ncell + 1), -1);
    auto inside = [&](int i, int j) {
        const double x = -radius + i * h, y = -radius + j * h;
        return x * x + y * y <= radius * radius * (1.0 + 1e-12);
    };
    auto getv = [&](int i, int j) {
        int& id = vid[static_cast<size_t>(j) * (ncell + 1) + i];
        if (id < 0) {
            id = mesh.num_vertices();
            mesh.vertices.emplace_back(-radius + i * h, -radius + j * h);
        }
        return id;
    };
    for (int j = 0; j < ncell; ++j)
        for (int i = 0; i < ncell; ++i) {
            if (inside(i, j) && inside(i + 1, j) && inside(i + 1, j + 1) && inside(i, j + 1)) {
                const int v00 = getv(i, j), v10 = getv(i + 1, j);
                const int v11 = getv(i + 1, j + 1), v01 = getv(i, j + 1);
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            }
        }
    if (mesh.triangles.empty()) throw std::invalid_argument("make_disk: resolution too coarse");
    mark_boundary_from_edges(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.boundary[v]) continue;
        const double r = mesh.vertices[v].norm();
        if (r > 0.0) mesh.vertices[v] *= radius / r;
    }
    finalize(mesh);
    return mesh;
}

Mesh build_mesh(const MeshSpec& spec) {
    if (spec.kind == "rectangle") return make_rectangle(spec.x0, spec.y0, spec.x1, spec.y1, spec.nx, spec.ny);
    if (spec.kind == "disk") return make_disk(spec.radius, spec.nx);
    throw std::invalid_argument("build_mesh: unknown mesh kind '" + spec.kind + "'");
}

void validate_mesh(const Mesh& mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty())
        throw std::runtime_error("mesh: empty");
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= mesh.num_vertices())
                throw std::runtime_error("mesh: triangle index out of range");
    for (double a : mesh.area)
        if (!(a > 0.0)) throw std::runtime_error("mesh: non-positive element area");
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    for (const auto& [edge, count] : edge_count) {
        if (count > 2) throw std::runtime_error("mesh: non-conforming edge");
        const bool on_boundary = mesh.boundary[edge.first] && mesh.boundary[edge.second];
        if (count == 1 && !on_boundary)
            throw std::runtime_error("mesh: boundary edge with unmarked vertex");
    }
}

}  // namespace facetflow
