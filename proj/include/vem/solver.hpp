#pragma once

#include <Eigen/Sparse>
#include <string>

#include "vem/geometry.hpp"
#include "vem/local.hpp"

namespace vem {

/// Global numbering: vertices first (two components each), then midpoint
/// nodes of the canonically ordered edges (lower vertex index first), then
/// cell moments. Boundary DOFs are those whose carrier lies on the boundary.
struct GlobalDofMap {
  int degree = 1;
  int n_dofs = 0;
  std::vector<std::vector<int>> cell_dofs;  // per cell: local -> global
  std::vector<std::uint8_t> on_boundary;    // per global DOF
  std::vector<Vec2> carrier;                // evaluation point of the DOF
  std::vector<std::uint8_t> component;      // 0 or 1 per global DOF
  std::vector<std::uint8_t> is_moment;      // internal moment DOFs (no carrier value)
};

GlobalDofMap build_dof_map(const Mesh& mesh, int degree);

struct SparseSystem {
  Eigen::SparseMatrix<double> A;  // full symmetric stiffness
  Eigen::VectorXd b;              // full load
};

/// Assemble the discrete bilinear form and load. Cell contributions are
/// accumulated in cell order, so the result is reproducible bit for bit.
/// Local failures abort with the offending cell id in the message.
SparseSystem assemble(const Mesh& mesh, const GlobalDofMap& map,
                      const Material& material, int degree, StabKind stab,
                      const VectorField& f);

struct ReducedSystem {
  Eigen::SparseMatrix<double> A;  // interior x interior, SPD
  Eigen::VectorXd b;
  Eigen::VectorXd g;              // full-length vector with boundary data filled in
  std::vector<int> interior;      // reduced index -> global index
  int n_full = 0;
};

/// Symmetric elimination of the Dirichlet DOFs: interior rows get
/// b -= A(:, boundary) * g, boundary rows and columns are removed.
ReducedSystem apply_dirichlet(const SparseSystem& system, const GlobalDofMap& map,
                              const VectorField& g);

enum class SolveMethod { automatic, direct, cg };

struct Solution {
  Eigen::VectorXd u;      // full DOF vector: boundary data plus solved interior
  std::string method;     // "ldlt", "cg", or "none" for an empty system
  int iterations = 0;
  double residual = 0;    // normwise backward error of the reduced solve
};

/// Sparse LDLT with iterative refinement; conjugate gradients with a diagonal
/// preconditioner (tolerance 1e-12, cap 20 n) when the factorization fails or
/// when forced. A relative residual above 1e-10 dumps the system to
/// vem_failed_system.txt and throws numerical_error.
Solution solve(const ReducedSystem& system, SolveMethod method = SolveMethod::automatic);

/// Plain-text dump: "%%sym-coord" header, "n nnz", then 1-based "i j value"
/// lines of the lower triangle.
void dump_system(const ReducedSystem& system, const std::string& path);

/// Global DOF vector of the interpolant of a smooth field.
Eigen::VectorXd interpolate_global(const Mesh& mesh, const GlobalDofMap& map,
                                   int degree, const VectorField& u);

}  // namespace vem
