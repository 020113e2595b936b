#pragma once

#include <cstdint>
#include <string>

#include "vem/generators.hpp"
#include "vem/solver.hpp"

namespace vem {

/// Exact displacement with its gradient and the matching load,
/// f = -(1/density) div sigma(u), so the pair solves the strong problem.
struct ManufacturedSolution {
  std::string id;
  VectorField u;
  std::function<Eigen::Matrix2d(const Vec2&)> grad_u;  // (i,j) = d u_i / d x_j
  VectorField f;
};

/// Known ids: "sine" (boundary-compatible on the unit square and the
/// L-shape) and "poly3" (unit square only).
ManufacturedSolution manufactured(const std::string& id, const Material& material);

/// Projected error norms: element-wise L2 and broken H1 distances between the
/// exact field and the energy projection of the discrete one, with a
/// quadrature of order 2k+2.
std::pair<double, double> error_norms(const Mesh& mesh, const GlobalDofMap& map,
                                      int degree, const Material& material,
                                      const ManufacturedSolution& solution,
                                      const Eigen::VectorXd& u);

/// L2 norm and H1 seminorm of the exact solution over the mesh, for
/// relative-error reporting.
std::pair<double, double> exact_norms(const Mesh& mesh, int degree,
                                      const ManufacturedSolution& solution);

struct StudyConfig {
  Domain domain = Domain::unit_square;
  MeshKind kind = MeshKind::squares;
  bool small_edges = false;
  double edge_fraction = 0.02;
  int degree = 1;
  std::vector<int> levels;
  double young = 1.0;
  double poisson = 0.35;
  double density = 1.0;
  StabKind stab = StabKind::derivative;
  std::string solution = "sine";
  std::string out_csv;  // empty disables the CSV artifact
  std::uint64_t seed = 0;
};

struct StudyRow {
  int level = 0;
  double h = 0;
  int ndof = 0;
  double err_l2 = 0;
  double err_h1 = 0;
  double rate_l2 = std::numeric_limits<double>::quiet_NaN();
  double rate_h1 = std::numeric_limits<double>::quiet_NaN();
};

/// Fill the rate columns from consecutive rows,
/// rate = log(e_prev / e) / log(h_prev / h); NaN marks an undefined rate.
void compute_rates(std::vector<StudyRow>& rows);

/// One refinement study: per level generate (and optionally split) the mesh,
/// assemble, solve with homogeneous Dirichlet data, record errors and rates.
/// Writes the CSV artifact when out_csv is set. Failures are rethrown with
/// the level prefixed.
std::vector<StudyRow> run_study(const StudyConfig& config);

/// header level,h,ndof,err_l2,err_h1,rate_l2,rate_h1 with full-precision
/// decimals, LF line endings, and blank fields for undefined rates.
std::string rows_to_csv(const std::vector<StudyRow>& rows);

}  // namespace vem
