#pragma once

#include "enclosure/geometry.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace enclosure {

/// Conforming P1 triangulation of a simply connected domain.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> boundary_vertices;         // ordered counterclockwise along the loop
  std::vector<std::array<int, 2>> boundary_edges;
  double h_max = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double signed_area(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;
  double total_area() const;
};

/// Default cap on generated triangles.
inline constexpr std::size_t kDefaultTriangleBudget = 4'000'000;

/// Structured triangulation with cell size target_h / 2, so every edge is
/// shorter than target_h. Rectangles use alternating diagonals; the unit disk
/// uses a square core of half-width 1/2 joined to the circle by a ring of
/// layers interpolated between the core perimeter and the circle (boundary
/// vertices lie exactly on the circle).
///
/// Throws InvalidParameter unless 0 < target_h <= diam(domain)/2 and
/// ResourceLimit if the mesh would exceed max_triangles.
Mesh generate_mesh(const Domain& domain, double target_h,
                   std::size_t max_triangles = kDefaultTriangleBudget);

struct MeshStats {
  double h_max;
  double min_angle_deg;
  std::size_t num_vertices;
  std::size_t num_triangles;
  std::size_t num_edges;
};

/// Recomputes the statistics from the connectivity. Throws InvalidMesh for an
/// empty mesh.
MeshStats mesh_stats(const Mesh& mesh);

/// Throws InvalidMesh on a nonpositive triangle area, an out-of-range index,
/// or a boundary that is not one closed loop.
void validate(const Mesh& mesh);

/// Writes vertices.csv (id,x,y) and triangles.csv (id,v0,v1,v2) into dir.
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

}  // namespace enclosure
