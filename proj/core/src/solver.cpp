#include "enclosure/solver.hpp"

#include "enclosure/csv.hpp"
#include "enclosure/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <limits>
#include <sstream>

namespace enclosure {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void apply(const CSymMat2& c, const Vec2& g, Complex& out_x, Complex& out_y) {
  out_x = c.c11 * g.x() + c.c12 * g.y();
  out_y = c.c12 * g.x() + c.c22 * g.y();
}

void check_sizes(const Mesh& mesh, const CoeffField& coeff) {
  if (coeff.per_triangle.size() != mesh.triangles.size())
    raise(ErrorCode::Assembly, "coefficient field does not match the mesh");
}

template <typename Sampler>
CoeffField sample(const Mesh& mesh, Sampler&& at) {
  CoeffField c;
  c.per_triangle.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) c.per_triangle.push_back(at(mesh.centroid(t)));
  return c;
}

}  // namespace

struct DirichletSystem::Factor {
  Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu;
};

CoeffField reduced_coefficients(const Mesh& mesh, const ReducedScene& scene) {
  return sample(mesh, [&](const Vec2& x) {
    return CSymMat2::from_parts(scene.sigma_tilde_at(x), scene.omega, scene.eps_tilde_at(x));
  });
}

CoeffField original_coefficients(const Mesh& mesh, const MaterialScene& scene) {
  return sample(mesh, [&](const Vec2& x) {
    return CSymMat2::from_parts(scene.sigma_at(x), scene.omega, scene.eps_at(x));
  });
}

CoeffField uniform_coefficients(const Mesh& mesh, Complex c) {
  return CoeffField{std::vector<CSymMat2>(mesh.triangles.size(), CSymMat2{c, Complex(0.0), c})};
}

std::vector<ElementGeometry> element_geometry(const Mesh& mesh) {
  std::vector<ElementGeometry> out;
  out.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec2& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec2& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double area = mesh.signed_area(t);
    if (!(area > 0.0))
      raise(ErrorCode::Assembly, "triangle " + std::to_string(t) + " is degenerate or clockwise");
    const double s = 1.0 / (2.0 * area);
    out.push_back({{Vec2((p1.y() - p2.y()) * s, (p2.x() - p1.x()) * s),
                    Vec2((p2.y() - p0.y()) * s, (p0.x() - p2.x()) * s),
                    Vec2((p0.y() - p1.y()) * s, (p1.x() - p0.x()) * s)},
                   area});
  }
  return out;
}

SparseMatrixC assemble(const Mesh& mesh, const CoeffField& coeff) {
  check_sizes(mesh, coeff);
  const auto geom = element_geometry(mesh);
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& g = geom[t];
    const auto& c = coeff.per_triangle[t];
    for (int j = 0; j < 3; ++j) {
      Complex cx, cy;
      apply(c, g.grad[static_cast<std::size_t>(j)], cx, cy);
      for (int i = 0; i < 3; ++i) {
        const Vec2& gi = g.grad[static_cast<std::size_t>(i)];
        trips.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                           g.area * (cx * gi.x() + cy * gi.y()));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  SparseMatrixC K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

DirichletSystem::DirichletSystem(const Mesh& mesh, CoeffField coeff)
    : mesh_(&mesh), coeff_(std::move(coeff)), factor_(std::make_unique<Factor>()) {
  K_ = assemble(mesh, coeff_);

  const std::size_t nv = mesh.vertices.size();
  std::vector<char> on_boundary(nv, 0);
  local_index_.assign(nv, -1);
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b) {
    const auto v = static_cast<std::size_t>(mesh.boundary_vertices[b]);
    on_boundary[v] = 1;
    local_index_[v] = static_cast<int>(b);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (!on_boundary[v]) {
      local_index_[v] = static_cast<int>(interior_.size());
      interior_.push_back(static_cast<int>(v));
    }
  }
  if (interior_.empty()) raise(ErrorCode::Assembly, "mesh has no interior vertices");

  std::vector<Triplet> ii, ib;
  ii.reserve(static_cast<std::size_t>(K_.nonZeros()));
  for (Eigen::Index col = 0; col < K_.outerSize(); ++col) {
    const auto cj = static_cast<std::size_t>(col);
    for (SparseMatrixC::InnerIterator it(K_, col); it; ++it) {
      const auto ri = static_cast<std::size_t>(it.row());
      if (on_boundary[ri]) continue;
      if (on_boundary[cj]) {
        ib.emplace_back(local_index_[ri], local_index_[cj], it.value());
      } else {
        ii.emplace_back(local_index_[ri], local_index_[cj], it.value());
      }
    }
  }
  const auto ni = static_cast<Eigen::Index>(interior_.size());
  const auto nb = static_cast<Eigen::Index>(mesh.boundary_vertices.size());
  K_ii_.resize(ni, ni);
  K_ii_.setFromTriplets(ii.begin(), ii.end());
  K_ii_.makeCompressed();
  K_ib_.resize(ni, nb);
  K_ib_.setFromTriplets(ib.begin(), ib.end());

  factor_->lu.analyzePattern(K_ii_);
  factor_->lu.factorize(K_ii_);
  if (factor_->lu.info() != Eigen::Success)
    throw SolveError("sparse LU factorization failed: " + factor_->lu.lastErrorMessage(),
                     std::numeric_limits<double>::infinity());
}

DirichletSystem::~DirichletSystem() = default;
DirichletSystem::DirichletSystem(DirichletSystem&&) noexcept = default;
DirichletSystem& DirichletSystem::operator=(DirichletSystem&&) noexcept = default;

MatrixC DirichletSystem::solve_interior(const MatrixC& rhs) const {
  MatrixC UI = factor_->lu.solve(rhs);
  auto residual = [&](const MatrixC& X) { return MatrixC(rhs - K_ii_ * X); };
  MatrixC R = residual(UI);

  auto worst = [&](const MatrixC& Rm) {
    double w = 0.0;
    for (Eigen::Index c = 0; c < Rm.cols(); ++c) {
      const double denom = rhs.col(c).norm();
      const double r = Rm.col(c).norm();
      w = std::max(w, denom > 0.0 ? r / denom : r);
    }
    return w;
  };
  double rel = worst(R);
  if (rel > kInteriorResidualTolerance) {
    UI += factor_->lu.solve(R);
    R = residual(UI);
    rel = worst(R);
  }
  if (!(rel <= kInteriorResidualTolerance)) {
    std::ostringstream os;
    os << "interior residual " << rel << " exceeds " << kInteriorResidualTolerance;
    throw SolveError(os.str(), rel);
  }
  return UI;
}

MatrixC DirichletSystem::solve_many(const MatrixC& F) const {
  if (F.rows() != static_cast<Eigen::Index>(mesh_->boundary_vertices.size()))
    raise(ErrorCode::Interface, "boundary data length does not match the mesh boundary");
  const MatrixC UI = solve_interior(-(K_ib_ * F));
  MatrixC U(static_cast<Eigen::Index>(mesh_->vertices.size()), F.cols());
  for (std::size_t k = 0; k < interior_.size(); ++k)
    U.row(interior_[k]) = UI.row(static_cast<Eigen::Index>(k));
  for (std::size_t b = 0; b < mesh_->boundary_vertices.size(); ++b)
    U.row(mesh_->boundary_vertices[b]) = F.row(static_cast<Eigen::Index>(b));
  return U;
}

MatrixC DirichletSystem::solve_homogeneous(const MatrixC& load) const {
  if (load.rows() != static_cast<Eigen::Index>(mesh_->vertices.size()))
    raise(ErrorCode::Interface, "load vector length does not match the mesh");
  MatrixC rhs(static_cast<Eigen::Index>(interior_.size()), load.cols());
  for (std::size_t k = 0; k < interior_.size(); ++k)
    rhs.row(static_cast<Eigen::Index>(k)) = load.row(interior_[k]);
  const MatrixC UI = solve_interior(rhs);
  MatrixC U = MatrixC::Zero(load.rows(), load.cols());
  for (std::size_t k = 0; k < interior_.size(); ++k)
    U.row(interior_[k]) = UI.row(static_cast<Eigen::Index>(k));
  return U;
}

DirichletSolution DirichletSystem::solve(std::span<const Complex> f) const {
  const auto nb = static_cast<Eigen::Index>(f.size());
  MatrixC F = Eigen::Map<const VectorC>(f.data(), nb);
  MatrixC U = solve_many(F);
  DirichletSolution sol;
  sol.mesh = mesh_;
  sol.u = U.col(0);
  sol.f = F.col(0);
  const VectorC rhs = -(K_ib_ * sol.f);
  VectorC ui(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) ui(static_cast<Eigen::Index>(k)) = sol.u(interior_[k]);
  const double denom = rhs.norm();
  const double r = (K_ii_ * ui - rhs).norm();
  sol.residual_norm = denom > 0.0 ? r / denom : r;
  return sol;
}

Complex bilinear_form(const Mesh& mesh, const CoeffField& coeff, const VectorC& u,
                      const VectorC& v) {
  check_sizes(mesh, coeff);
  const auto nv = static_cast<Eigen::Index>(mesh.vertices.size());
  if (u.size() != nv || v.size() != nv)
    raise(ErrorCode::Interface, "nodal vector length does not match the mesh");
  const auto geom = element_geometry(mesh);
  std::vector<int> all(mesh.triangles.size());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
  return contrast_pairing(geom, mesh, coeff, Complex(0.0), u, v, all);
}

Complex dtn_pairing(const Mesh& mesh, const CoeffField& coeff, const DirichletSolution& sol,
                    std::span<const Complex> g) {
  if (sol.mesh != &mesh) raise(ErrorCode::Interface, "solution was computed on a different mesh");
  if (g.size() != mesh.boundary_vertices.size())
    raise(ErrorCode::Interface, "boundary data length does not match the mesh boundary");
  VectorC v = VectorC::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t b = 0; b < g.size(); ++b) v(mesh.boundary_vertices[b]) = g[b];
  return bilinear_form(mesh, coeff, sol.u, v);
}

Complex dtn_difference_pairing(const ReducedScene& scene, const Mesh& mesh,
                               std::span<const Complex> f, std::span<const Complex> g) {
  const CoeffField reduced = reduced_coefficients(mesh, scene);
  const CoeffField background = uniform_coefficients(mesh, Complex(1.0, 0.0));
  const DirichletSystem sys_r(mesh, reduced);
  const DirichletSystem sys_0(mesh, background);
  const auto u = sys_r.solve(f);
  const auto u0 = sys_0.solve(f);
  return dtn_pairing(mesh, reduced, u, g) - dtn_pairing(mesh, background, u0, g);
}

Complex contrast_pairing(const std::vector<ElementGeometry>& geom, const Mesh& mesh,
                         const CoeffField& coeff, Complex c0, const VectorC& u,
                         const VectorC& v0, std::span<const int> triangles) {
  Complex sum(0.0);
  for (int t : triangles) {
    const auto ts = static_cast<std::size_t>(t);
    const auto& tri = mesh.triangles[ts];
    const auto& g = geom[ts];
    Complex ux(0.0), uy(0.0), vx(0.0), vy(0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const Complex uk = u(tri[k]);
      const Complex vk = v0(tri[k]);
      ux += uk * g.grad[k].x();
      uy += uk * g.grad[k].y();
      vx += vk * g.grad[k].x();
      vy += vk * g.grad[k].y();
    }
    const auto& c = coeff.per_triangle[ts];
    const Complex d11 = c.c11 - c0;
    const Complex d22 = c.c22 - c0;
    sum += g.area * ((d11 * ux + c.c12 * uy) * vx + (c.c12 * ux + d22 * uy) * vy);
  }
  return sum;
}

std::vector<int> contrast_triangles(const CoeffField& coeff, Complex c0) {
  std::vector<int> out;
  for (std::size_t t = 0; t < coeff.per_triangle.size(); ++t) {
    const auto& c = coeff.per_triangle[t];
    if (c.c11 != c0 || c.c22 != c0 || c.c12 != Complex(0.0)) out.push_back(static_cast<int>(t));
  }
  return out;
}

void write_solution_csv(const DirichletSolution& sol, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.header({"id", "re_u", "im_u"});
  for (Eigen::Index i = 0; i < sol.u.size(); ++i) {
    w.field(static_cast<long long>(i)).field(sol.u(i).real()).field(sol.u(i).imag());
    w.end_row();
  }
}

}  // namespace enclosure
