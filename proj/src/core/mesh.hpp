#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace facetflow {

using Vec2 = Eigen::Vector2d;

// Descriptor from which a mesh can be rebuilt (also what manifests record).
struct MeshSpec {
    std::string kind = "rectangle";  // "rectangle" | "disk"
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double radius = 1.0;
    int nx = 32, ny = 32;  // disk uses nx cells across the diameter

    MeshSpec refined() const {
        MeshSpec s = *this;
        s.nx *= 2;
        s.ny *= 2;
        return s;
    }
};

// Conforming triangulation of a 2-D domain. Per-triangle data (area, P1
// basis gradients, centroid) is precomputed once; all solvers and
// diagnostics read it from here.
struct Mesh {
    MeshSpec spec;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> boundary;          // per vertex
    std::vector<double> area;            // per triangle, positive
    std::vector<std::array<Vec2, 3>> basis_grad;
    std::vector<Vec2> centroid;
    std::vector<double> lumped;          // per-vertex lumped volume (sum area/3)
    double h = 0.0;                      // grid spacing

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    double total_area() const;
    double diameter() const;
};

// Structured triangulation of an axis-aligned rectangle; each cell split
// into two triangles.
Mesh make_rectangle(double x0, double y0, double x1, double y1, int nx, int ny);

// Disk of given radius: rectangle grid masked to the disk, outer vertices
// snapped radially onto the circle.
Mesh make_disk(double radius, int ncell);

Mesh build_mesh(const MeshSpec& spec);

// Checks conformity (interior edges shared by exactly two triangles),
// positive areas, and boundary consistency. Throws on failure.
void validate_mesh(const Mesh& mesh);

}  // namespace facetflow
