#include "enclosure/mesh.hpp"

#include "enclosure/csv.hpp"
#include "enclosure/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace enclosure {

namespace {

constexpr double kCoreHalfWidth = 0.5;

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

void push_ccw(Mesh& mesh, int a, int b, int c) {
  const auto& v = mesh.vertices;
  if (tri_area(v[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)],
               v[static_cast<std::size_t>(c)]) < 0.0)
    std::swap(b, c);
  mesh.triangles.push_back({a, b, c});
}

// Splits quad (p0, p1, p2, p3), given in cyclic order, along its shorter diagonal.
void push_quad(Mesh& mesh, int p0, int p1, int p2, int p3) {
  const auto& v = mesh.vertices;
  const double d02 = (v[static_cast<std::size_t>(p0)] - v[static_cast<std::size_t>(p2)]).squaredNorm();
  const double d13 = (v[static_cast<std::size_t>(p1)] - v[static_cast<std::size_t>(p3)]).squaredNorm();
  if (d02 <= d13) {
    push_ccw(mesh, p0, p1, p2);
    push_ccw(mesh, p0, p2, p3);
  } else {
    push_ccw(mesh, p0, p1, p3);
    push_ccw(mesh, p1, p2, p3);
  }
}

void finish_boundary(Mesh& mesh) {
  const std::size_t n = mesh.boundary_vertices.size();
  mesh.boundary_edges.clear();
  mesh.boundary_edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    mesh.boundary_edges.push_back({mesh.boundary_vertices[i], mesh.boundary_vertices[(i + 1) % n]});
}

double longest_edge(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto& a = mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
      const auto& b = mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])];
      h = std::max(h, (a - b).norm());
    }
  }
  return h;
}

void check_budget(std::size_t estimate, std::size_t budget, double target_h) {
  if (estimate > budget) {
    std::ostringstream os;
    os << "target_h = " << target_h << " needs about " << estimate
       << " triangles, above the budget of " << budget;
    raise(ErrorCode::ResourceLimit, os.str());
  }
}

Mesh rectangle_mesh(const Rectangle& r, double target_h, std::size_t budget) {
  const double cell = 0.5 * target_h;
  const auto nx = static_cast<std::size_t>(std::ceil((r.x_max - r.x_min) / cell - 1e-9));
  const auto ny = static_cast<std::size_t>(std::ceil((r.y_max - r.y_min) / cell - 1e-9));
  check_budget(2 * nx * ny, budget, target_h);

  Mesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = j == ny ? r.y_max : r.y_min + (r.y_max - r.y_min) * static_cast<double>(j) / static_cast<double>(ny);
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = i == nx ? r.x_max : r.x_min + (r.x_max - r.x_min) * static_cast<double>(i) / static_cast<double>(nx);
      mesh.vertices.emplace_back(x, y);
    }
  }
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<int>(j * (nx + 1) + i); };
  mesh.triangles.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        push_ccw(mesh, a, b, c);
        push_ccw(mesh, a, c, d);
      } else {
        push_ccw(mesh, a, b, d);
        push_ccw(mesh, b, c, d);
      }
    }
  }
  for (std::size_t i = 0; i < nx; ++i) mesh.boundary_vertices.push_back(id(i, 0));
  for (std::size_t j = 0; j < ny; ++j) mesh.boundary_vertices.push_back(id(nx, j));
  for (std::size_t i = nx; i > 0; --i) mesh.boundary_vertices.push_back(id(i, ny));
  for (std::size_t j = ny; j > 0; --j) mesh.boundary_vertices.push_back(id(0, j));
  finish_boundary(mesh);
  return mesh;
}

Mesh disk_mesh(double target_h, std::size_t budget) {
  const double s = kCoreHalfWidth;
  const double cell = 0.5 * target_h;
  auto n = static_cast<std::size_t>(std::ceil(2.0 * s / cell - 1e-9));
  n = std::max<std::size_t>(2, n + (n % 2));                                 // core cells per side, even
  const auto layers = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((1.0 - s) * static_cast<double>(n) / (2.0 * s) - 1e-9)));
  const std::size_t perimeter = 4 * n;
  check_budget(2 * n * n + 2 * perimeter * layers, budget, target_h);

  Mesh mesh;
  mesh.vertices.reserve((n + 1) * (n + 1) + perimeter * layers);
  const double step = 2.0 * s / static_cast<double>(n);
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(-s + step * static_cast<double>(i), -s + step * static_cast<double>(j));
  }
  auto core = [&](std::size_t i, std::size_t j) { return static_cast<int>(j * (n + 1) + i); };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const int a = core(i, j), b = core(i + 1, j), c = core(i + 1, j + 1), d = core(i, j + 1);
      // diagonals point away from the centre so that the core corners are cut radially
      const bool rising = (i < n / 2) == (j < n / 2);
      if (rising) {
        push_ccw(mesh, a, b, c);
        push_ccw(mesh, a, c, d);
      } else {
        push_ccw(mesh, a, b, d);
        push_ccw(mesh, b, c, d);
      }
    }
  }

  // Core perimeter, counterclockwise from (s, 0).
  std::vector<int> ring0;
  ring0.reserve(perimeter);
  const std::size_t h = n / 2;
  for (std::size_t j = h; j < n; ++j) ring0.push_back(core(n, j));
  for (std::size_t i = n; i > 0; --i) ring0.push_back(core(i, n));
  for (std::size_t j = n; j > 0; --j) ring0.push_back(core(0, j));
  for (std::size_t i = 0; i < n; ++i) ring0.push_back(core(i, 0));
  for (std::size_t j = 0; j < h; ++j) ring0.push_back(core(n, j));

  std::vector<std::vector<int>> rings{ring0};
  for (std::size_t k = 1; k <= layers; ++k) {
    std::vector<int> ring;
    ring.reserve(perimeter);
    const double lambda = static_cast<double>(k) / static_cast<double>(layers);
    for (std::size_t p = 0; p < perimeter; ++p) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(perimeter);
      const Vec2 outer(std::cos(angle), std::sin(angle));
      const Vec2 inner = mesh.vertices[static_cast<std::size_t>(ring0[p])];
      ring.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back(k == layers ? outer : Vec2(inner + lambda * (outer - inner)));
    }
    rings.push_back(std::move(ring));
  }
  for (std::size_t k = 0; k < layers; ++k) {
    for (std::size_t p = 0; p < perimeter; ++p) {
      const std::size_t q = (p + 1) % perimeter;
      push_quad(mesh, rings[k][p], rings[k][q], rings[k + 1][q], rings[k + 1][p]);
    }
  }
  mesh.boundary_vertices = rings.back();
  finish_boundary(mesh);
  return mesh;
}

}  // namespace

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return tri_area(vertices[static_cast<std::size_t>(tri[0])], vertices[static_cast<std::size_t>(tri[1])],
                  vertices[static_cast<std::size_t>(tri[2])]);
}

Vec2 Mesh::centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (vertices[static_cast<std::size_t>(tri[0])] + vertices[static_cast<std::size_t>(tri[1])] +
          vertices[static_cast<std::size_t>(tri[2])]) /
         3.0;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += signed_area(t);
  return a;
}

Mesh generate_mesh(const Domain& domain, double target_h, std::size_t max_triangles) {
  validate(domain);
  const double diam = diameter(domain);
  if (!(target_h > 0.0) || !(target_h <= diam / 2.0)) {
    std::ostringstream os;
    os << "target_h must lie in (0, " << diam / 2.0 << "], got " << target_h;
    raise(ErrorCode::InvalidParameter, os.str());
  }
  Mesh mesh = std::holds_alternative<Rectangle>(domain)
                  ? rectangle_mesh(std::get<Rectangle>(domain), target_h, max_triangles)
                  : disk_mesh(target_h, max_triangles);
  mesh.h_max = longest_edge(mesh);
  return mesh;
}

MeshStats mesh_stats(const Mesh& mesh) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    raise(ErrorCode::InvalidMesh, "mesh has no vertices or triangles");
  double min_angle = 180.0;
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      const int c = t[static_cast<std::size_t>((k + 2) % 3)];
      edges[{std::min(a, b), std::max(a, b)}] += 1;
      const Vec2 u = mesh.vertices[static_cast<std::size_t>(b)] - mesh.vertices[static_cast<std::size_t>(a)];
      const Vec2 w = mesh.vertices[static_cast<std::size_t>(c)] - mesh.vertices[static_cast<std::size_t>(a)];
      const double ang = std::atan2(std::abs(u.x() * w.y() - u.y() * w.x()), u.dot(w));
      min_angle = std::min(min_angle, ang * 180.0 / std::numbers::pi);
    }
  }
  return {longest_edge(mesh), min_angle, mesh.vertices.size(), mesh.triangles.size(), edges.size()};
}

void validate(const Mesh& mesh) {
  const auto nv = static_cast<int>(mesh.vertices.size());
  if (nv == 0 || mesh.triangles.empty()) raise(ErrorCode::InvalidMesh, "mesh is empty");
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int v : mesh.triangles[t]) {
      if (v < 0 || v >= nv) raise(ErrorCode::InvalidMesh, "triangle references a missing vertex");
    }
    if (!(mesh.signed_area(t) > 0.0))
      raise(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) + " has nonpositive area");
  }
  // boundary edges are exactly the edges used by one triangle, and they chain into one loop
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  std::size_t n_boundary = 0;
  for (const auto& [e, c] : count) {
    if (c > 2) raise(ErrorCode::InvalidMesh, "edge shared by more than two triangles");
    if (c == 1) ++n_boundary;
  }
  if (n_boundary != mesh.boundary_edges.size())
    raise(ErrorCode::InvalidMesh, "boundary edge list does not match the triangulation");
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& e = mesh.boundary_edges[i];
    const auto& next = mesh.boundary_edges[(i + 1) % mesh.boundary_edges.size()];
    if (e[1] != next[0]) raise(ErrorCode::InvalidMesh, "boundary edges do not form a closed loop");
    auto it = count.find({std::min(e[0], e[1]), std::max(e[0], e[1])});
    if (it == count.end() || it->second != 1)
      raise(ErrorCode::InvalidMesh, "listed boundary edge is not on the boundary");
  }
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    csv::Writer w(dir / "vertices.csv");
    w.header({"id", "x", "y"});
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      w.field(i).field(mesh.vertices[i].x()).field(mesh.vertices[i].y());
      w.end_row();
    }
  }
  csv::Writer w(dir / "triangles.csv");
  w.header({"id", "v0", "v1", "v2"});
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    w.field(i).field(t[0]).field(t[1]).field(t[2]);
    w.end_row();
  }
}

}  // namespace enclosure
