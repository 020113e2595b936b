#pragma once

#include "vem/types.hpp"

namespace vem {

/// Number of scalar monomials of total degree <= k.
inline int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Graded-lex exponents: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
std::pair<int, int> monomial_exponent(int idx);
int monomial_index(int ax, int ay);

/// Scaled monomials m_a(x) = ((x-c)/h)^a1 ((y-c)/h)^a2 for |a| <= degree,
/// centered at the cell centroid and scaled by the cell diameter.
struct ScaledMonomialBasis {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  int degree = 1;
  int size() const { return monomial_count(degree); }
};

/// Values of all basis monomials at a point.
Eigen::VectorXd eval_basis(const ScaledMonomialBasis& basis, const Vec2& p);

/// Gradients (rows) of all basis monomials at a point; carries the 1/h scale.
Eigen::MatrixX2d eval_basis_grad(const ScaledMonomialBasis& basis, const Vec2& p);

struct QuadratureRule {
  std::vector<Vec2> points;
  Eigen::VectorXd weights;
  bool used_fallback = false;  // polygon rule resorted to ear clipping
};

/// Gauss-Legendre nodes/weights on [-1,1], cached; n in [1, 24].
struct GaussRule {
  Eigen::VectorXd x, w;
};
const GaussRule& gauss_legendre(int n);

/// Exact integrals of every basis monomial of degree <= up_to_degree over a
/// simple CCW polygon, via the divergence-theorem reduction to edge integrals
/// evaluated with Gauss rules of sufficient order.
Eigen::VectorXd polygon_monomial_moments(const Polygon& poly,
                                         const ScaledMonomialBasis& basis,
                                         int up_to_degree);

/// Positive-weight rule exact for bivariate polynomials of total degree
/// <= order, built by fan triangulation about the centroid (ear clipping when
/// some edge is not visible from it) and a tensor rule per sub-triangle.
QuadratureRule polygon_quadrature(const Polygon& poly, int order);

/// Gauss-Legendre rule along the segment [a, b], exact for univariate degree
/// <= order. Throws on a zero-length segment.
QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int order);

}  // namespace vem
