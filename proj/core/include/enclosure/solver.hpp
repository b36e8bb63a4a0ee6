#pragma once

#include "enclosure/materials.hpp"
#include "enclosure/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace enclosure {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;

/// Piecewise-constant complex symmetric coefficient, one tensor per triangle.
struct CoeffField {
  std::vector<CSymMat2> per_triangle;
};

/// sigma~ - i omega eps~ sampled at triangle centroids.
CoeffField reduced_coefficients(const Mesh& mesh, const ReducedScene& scene);

/// sigma - i omega eps sampled at triangle centroids.
CoeffField original_coefficients(const Mesh& mesh, const MaterialScene& scene);

/// c * I on every triangle.
CoeffField uniform_coefficients(const Mesh& mesh, Complex c);

/// Gradients of the three P1 hat functions and the area of each triangle.
struct ElementGeometry {
  std::array<Vec2, 3> grad;
  double area;
};

/// Throws Assembly on a degenerate (nonpositive area) triangle.
std::vector<ElementGeometry> element_geometry(const Mesh& mesh);

/// K_ij = sum_T (A_T grad phi_j) . grad phi_i |T|. Complex symmetric, not
/// Hermitian. Throws Assembly on a degenerate triangle or size mismatch.
SparseMatrixC assemble(const Mesh& mesh, const CoeffField& coeff);

/// Nodal solution with its boundary trace. u on boundary vertices equals f.
struct DirichletSolution {
  const Mesh* mesh = nullptr;
  VectorC u;  // one value per vertex
  VectorC f;  // one value per boundary vertex, in mesh.boundary_vertices order
  double residual_norm = 0.0;
};

inline constexpr double kInteriorResidualTolerance = 1e-10;

/// Assembled and factorized Dirichlet problem for one coefficient field.
/// Boundary values are eliminated; the interior block is factorized once with
/// a sparse LU (COLAMD ordering) and reused for every right-hand side. The
/// referenced mesh must outlive the system. solve() is const and may be
/// called concurrently.
class DirichletSystem {
public:
  DirichletSystem(const Mesh& mesh, CoeffField coeff);
  ~DirichletSystem();
  DirichletSystem(DirichletSystem&&) noexcept;
  DirichletSystem& operator=(DirichletSystem&&) noexcept;

  /// Throws SolveError if the relative interior residual exceeds
  /// kInteriorResidualTolerance after one refinement step.
  DirichletSolution solve(std::span<const Complex> f) const;

  /// Column-wise batch solve. F has one row per boundary vertex; the result
  /// has one row per vertex.
  MatrixC solve_many(const MatrixC& F) const;

  /// Solves K w = load on interior vertices with w = 0 on the boundary.
  /// `load` has one row per vertex (boundary rows are ignored); the result
  /// has one row per vertex. Same residual contract as solve().
  MatrixC solve_homogeneous(const MatrixC& load) const;

  const Mesh& mesh() const { return *mesh_; }
  const CoeffField& coefficients() const { return coeff_; }
  const SparseMatrixC& stiffness() const { return K_; }
  std::size_t num_interior() const { return interior_.size(); }

private:
  struct Factor;

  MatrixC solve_interior(const MatrixC& rhs) const;

  const Mesh* mesh_;
  CoeffField coeff_;
  SparseMatrixC K_;
  SparseMatrixC K_ii_;
  SparseMatrixC K_ib_;
  std::vector<int> interior_;      // interior vertex ids
  std::vector<int> local_index_;   // vertex id -> interior or boundary position
  std::unique_ptr<Factor> factor_;
};

/// sum_T (A_T grad u) . grad v |T| for nodal vectors u, v (bilinear, no
/// conjugation).
Complex bilinear_form(const Mesh& mesh, const CoeffField& coeff, const VectorC& u,
                      const VectorC& v);

/// <Lambda f, g> using the zero interior extension of g. Throws Interface
/// when the solution belongs to another mesh or g has the wrong length.
Complex dtn_pairing(const Mesh& mesh, const CoeffField& coeff, const DirichletSolution& sol,
                    std::span<const Complex> g);

/// <(Lambda_reduced - Lambda_identity) f, g> as the difference of two
/// independent solves and pairings.
Complex dtn_difference_pairing(const ReducedScene& scene, const Mesh& mesh,
                               std::span<const Complex> f, std::span<const Complex> g);

/// Contrast form of the DtN difference: sum over triangles of
/// ((A_T - c0 I) grad u) . grad v0 |T|, where u solves the problem with
/// coefficient A and v0 is the solution for the homogeneous coefficient
/// c0 I with data g. Discretely identical to the difference of the two
/// pairings, without the cancellation.
Complex contrast_pairing(const std::vector<ElementGeometry>& geom, const Mesh& mesh,
                         const CoeffField& coeff, Complex c0, const VectorC& u,
                         const VectorC& v0, std::span<const int> triangles);

/// Triangles whose coefficient differs from c0 I.
std::vector<int> contrast_triangles(const CoeffField& coeff, Complex c0);

/// Writes u.csv (vertex id, Re u, Im u).
void write_solution_csv(const DirichletSolution& sol, const std::filesystem::path& path);

}  // namespace enclosure
