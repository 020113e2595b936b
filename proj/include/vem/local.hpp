#pragma once

#include <array>

#include "vem/quadrature.hpp"
#include "vem/types.hpp"

namespace vem {

/// Plane-strain material data. The Lame pair is derived from (E, nu) and
/// blows up as nu -> 1/2, which is rejected.
struct Material {
  double young = 1.0;
  double poisson = 0.0;
  double mu = 0.5;      // E / (2 (1 + nu))
  double lambda = 0.0;  // E nu / ((1 + nu)(1 - 2 nu))
  double density = 1.0;
};

std::pair<double, double> lame_from_young_poisson(double young, double poisson);
Material make_material(double young, double poisson, double density = 1.0);

enum class StabKind {
  derivative,  // h_E * integral over the boundary of tangential derivatives
  classic,     // sum of vertex-value products (dofi-dofi on vertices)
};

/// Local DOF numbering for degree k in {1,2} on an n-gon. Components are
/// interleaved per carrier: [v0x v0y v1x v1y ... | e0x e0y ... | mx my].
/// Edge e runs from vertex e to vertex (e+1) % n and carries one midpoint
/// node when k = 2; internal moments are mean values (scaled by 1/|E|).
struct DofLayout {
  int degree = 1;
  int n_vertices = 0;

  static DofLayout make(int degree, int n_vertices);

  int n_edges() const { return n_vertices; }
  int n_dofs() const {
    return degree == 1 ? 2 * n_vertices : 2 * (2 * n_vertices + 1);
  }
  int vertex_dof(int i, int comp) const { return 2 * i + comp; }
  int edge_dof(int e, int comp) const { return 2 * n_vertices + 2 * e + comp; }
  int moment_dof(int comp) const { return 4 * n_vertices + comp; }
  /// Trace DOFs of edge e for one component, ordered along the edge.
  std::vector<int> edge_trace_dofs(int e, int comp) const;
};

/// Everything the element contributes through projections: the energy
/// projector in monomial (pi_star) and DOF (pi_dof) coordinates, the L2
/// projectors, and the exact monomial Gram matrices used to build them.
struct LocalOperators {
  ScaledMonomialBasis basis;
  DofLayout layout;
  double area = 0;
  double perimeter = 0;

  Eigen::MatrixXd pi_star;   // 2 nk x ndof : DOFs -> monomial coefficients of the energy projection
  Eigen::MatrixXd pi_dof;    // ndof x ndof : the same projection expressed on DOFs
  Eigen::MatrixXd pi0_k;     // 2 nk x ndof : L2 projection onto vector polynomials of degree k
  Eigen::MatrixXd pi0_1;     // 6 x ndof    : L2 projection onto degree 1 (load term)
  Eigen::MatrixXd pi0_km2;   // 2 x ndof for k = 2, empty for k = 1
  Eigen::MatrixXd stiffness_monomial;  // 2 nk x 2 nk : a^E(m_a, m_b), exact
  Eigen::MatrixXd mass_monomial;       // nk x nk : scalar monomial Gram matrix
  Eigen::VectorXd moments;             // scalar monomial integrals up to degree 2k
};

/// Build all local projection operators for one cell. Throws
/// std::invalid_argument for degree outside {1,2} and numerical_error for
/// degenerate cells or a constraint residual above 1e-9.
LocalOperators element_operators(const Polygon& cell, const Material& material,
                                 int degree);

Eigen::MatrixXd stab_derivative(const Polygon& cell, const DofLayout& layout);
Eigen::MatrixXd stab_classic(const DofLayout& layout);

/// K_E = pi_star^T G pi_star + (I - pi_dof)^T S (I - pi_dof). Aborts with
/// numerical_error if the result is asymmetric beyond 1e-11 relative or its
/// near-kernel (eigenvalues below 1e-9 * lambda_max) is not exactly the three
/// rigid modes.
Eigen::MatrixXd local_stiffness(const Polygon& cell, const LocalOperators& ops,
                                StabKind stab);

/// Load vector F_i = integral of density * f . (L2-projection of phi_i onto
/// degree-1 polynomials), integrated with a rule of order 2k+2.
Eigen::VectorXd local_load(const Polygon& cell, const LocalOperators& ops,
                           const Material& material, const VectorField& f);

/// DOF vector of the interpolant: point values at vertices and edge nodes,
/// mean values for the internal moments (k = 2).
Eigen::VectorXd interpolate_local(const Polygon& cell, int degree,
                                  const VectorField& u);

/// Seminorm combining the internal polynomial projection with scaled
/// edge-wise projections of the boundary trace.
double triple_norm(const Polygon& cell, const LocalOperators& ops,
                   const Eigen::VectorXd& dofs);

/// Coefficients, in the Legendre-style edge basis {1, 2s/len - 1}, of the
/// L2(edge) projection of the nodal trace onto degree target_degree.
Eigen::VectorXd edge_l2_projector(double length, const Eigen::VectorXd& node_values,
                                  int target_degree);

/// DOF vectors of the two translations and the rotation about the centroid.
std::array<Eigen::VectorXd, 3> rigid_modes(const Polygon& cell, int degree);

}  // namespace vem
