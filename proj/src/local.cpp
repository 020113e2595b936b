#include "vem/local.hpp"

#include <cmath>

#include "vem/geometry.hpp"

namespace vem {

std::pair<double, double> lame_from_young_poisson(double young, double poisson) {
  if (!(young > 0))
    throw std::invalid_argument("Young modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5))
    throw std::invalid_argument(
        "Poisson ratio must lie in (-1, 1/2); lambda diverges at 1/2");
  const double mu = young / (2.0 * (1.0 + poisson));
  const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  return {mu, lambda};
}

Material make_material(double young, double poisson, double density) {
  if (!(density > 0)) throw std::invalid_argument("density must be positive");
  const auto [mu, lambda] = lame_from_young_poisson(young, poisson);
  return {young, poisson, mu, lambda, density};
}

DofLayout DofLayout::make(int degree, int n_vertices) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("degree k = " + std::to_string(degree) +
                                " unsupported; only k in {1,2}");
  if (n_vertices < 3)
    throw std::invalid_argument("DofLayout: cell needs at least 3 vertices");
  return {degree, n_vertices};
}

std::vector<int> DofLayout::edge_trace_dofs(int e, int comp) const {
  const int e1 = (e + 1) % n_vertices;
  if (degree == 1) return {vertex_dof(e, comp), vertex_dof(e1, comp)};
  return {vertex_dof(e, comp), edge_dof(e, comp), vertex_dof(e1, comp)};
}

namespace {

// Lagrange trace basis on an edge, parametrized by t in [0,1]; nodes are the
// endpoints plus the midpoint when k = 2.
void trace_shape(int degree, double t, double* val, double* dval) {
  if (degree == 1) {
    if (val) { val[0] = 1.0 - t; val[1] = t; }
    if (dval) { dval[0] = -1.0; dval[1] = 1.0; }
  } else {
    if (val) {
      val[0] = (1.0 - t) * (1.0 - 2.0 * t);
      val[1] = 4.0 * t * (1.0 - t);
      val[2] = t * (2.0 * t - 1.0);
    }
    if (dval) {
      dval[0] = 4.0 * t - 3.0;
      dval[1] = 4.0 - 8.0 * t;
      dval[2] = 4.0 * t - 1.0;
    }
  }
}

double moment_of(const Eigen::VectorXd& mom, int ax, int ay) {
  return mom(monomial_index(ax, ay));
}

}  // namespace

LocalOperators element_operators(const Polygon& cell, const Material& material,
                                 int degree) {
  const int nv = static_cast<int>(cell.size());
  LocalOperators ops;
  ops.layout = DofLayout::make(degree, nv);
  ops.area = polygon_area(cell);
  if (!(ops.area > 0))
    throw numerical_error("element_operators: cell has non-positive area");
  ops.perimeter = polygon_perimeter(cell);
  ops.basis = {polygon_centroid(cell), polygon_diameter(cell), degree};

  const int k = degree;
  const int nk = ops.basis.size();
  const int n2 = 2 * nk;
  const int nd = ops.layout.n_dofs();
  const double h = ops.basis.scale;
  const double mu = material.mu;
  const double lam = material.lambda;

  ops.moments = polygon_monomial_moments(cell, ops.basis, 2 * k);
  const Eigen::VectorXd& mom = ops.moments;

  Eigen::MatrixXd H(nk, nk);
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b) {
      const auto [ax, ay] = monomial_exponent(a);
      const auto [bx, by] = monomial_exponent(b);
      H(a, b) = moment_of(mom, ax + bx, ay + by);
    }
  ops.mass_monomial = H;

  // Exact elastic energy between vector monomials. Component blocks are
  // ordered x-first: beta = comp * nk + a.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n2, n2);
  {
    auto ixx = [&](int a, int b) {
      const auto [ax, ay] = monomial_exponent(a);
      const auto [bx, by] = monomial_exponent(b);
      if (ax < 1 || bx < 1) return 0.0;
      return ax * bx / (h * h) * moment_of(mom, ax + bx - 2, ay + by);
    };
    auto iyy = [&](int a, int b) {
      const auto [ax, ay] = monomial_exponent(a);
      const auto [bx, by] = monomial_exponent(b);
      if (ay < 1 || by < 1) return 0.0;
      return ay * by / (h * h) * moment_of(mom, ax + bx, ay + by - 2);
    };
    auto ixy = [&](int a, int b) {  // int dx m_a dy m_b
      const auto [ax, ay] = monomial_exponent(a);
      const auto [bx, by] = monomial_exponent(b);
      if (ax < 1 || by < 1) return 0.0;
      return ax * by / (h * h) * moment_of(mom, ax + bx - 1, ay + by - 1);
    };
    for (int a = 0; a < nk; ++a)
      for (int b = 0; b < nk; ++b) {
        G(a, b) = (2.0 * mu + lam) * ixx(a, b) + mu * iyy(a, b);
        G(a, nk + b) = mu * ixy(b, a) + lam * ixy(a, b);
        G(nk + a, b) = mu * ixy(a, b) + lam * ixy(b, a);
        G(nk + a, nk + b) = (2.0 * mu + lam) * iyy(a, b) + mu * ixx(a, b);
      }
  }
  ops.stiffness_monomial = G;

  // DOF functionals applied to the vector monomials.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nd, n2);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < nv; ++i) {
      const Eigen::VectorXd vals = eval_basis(ops.basis, cell[static_cast<std::size_t>(i)]);
      D.row(ops.layout.vertex_dof(i, c)).segment(c * nk, nk) = vals.transpose();
    }
    if (k == 2) {
      for (int e = 0; e < nv; ++e) {
        const Vec2 midpoint =
            0.5 * (cell[static_cast<std::size_t>(e)] + cell[static_cast<std::size_t>((e + 1) % nv)]);
        const Eigen::VectorXd vals = eval_basis(ops.basis, midpoint);
        D.row(ops.layout.edge_dof(e, c)).segment(c * nk, nk) = vals.transpose();
      }
      for (int a = 0; a < nk; ++a)
        D(ops.layout.moment_dof(c), c * nk + a) = mom(a) / ops.area;
    }
  }

  // Galerkin right side B(beta, j) = a^E(phi_j, p_beta), assembled DOF-only:
  // the boundary term integrates the known edge traces against the monomial
  // tractions, the volume term (k = 2 only) reads the internal mean values
  // against the constant vector div sigma(p_beta).
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n2, nd);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, n2);
  Eigen::MatrixXd Cd = Eigen::MatrixXd::Zero(3, nd);

  const int tn = k + 1;  // trace nodes per edge per component
  const GaussRule& gr = gauss_legendre(k + 2);
  for (int e = 0; e < nv; ++e) {
    const Vec2& pa = cell[static_cast<std::size_t>(e)];
    const Vec2& pb = cell[static_cast<std::size_t>((e + 1) % nv)];
    const double len = (pb - pa).norm();
    if (!(len > 0)) throw numerical_error("element_operators: zero-length edge");
    const Vec2 tangent = (pb - pa) / len;
    const Vec2 normal(tangent.y(), -tangent.x());  // outward for a CCW loop

    for (int g = 0; g < gr.x.size(); ++g) {
      const double t = 0.5 * (1.0 + gr.x(g));
      const double w = 0.5 * gr.w(g) * len;
      const Vec2 p = pa + t * (pb - pa);
      const Eigen::MatrixX2d grad = eval_basis_grad(ops.basis, p);
      const Eigen::VectorXd vals = eval_basis(ops.basis, p);
      double shape[3];
      trace_shape(k, t, shape, nullptr);

      for (int a = 0; a < nk; ++a) {
        const double gx = grad(a, 0), gy = grad(a, 1);
        // traction sigma(p_beta) n for the x- and y-component monomial blocks
        const Vec2 trac_x((2.0 * mu + lam) * gx * normal.x() + mu * gy * normal.y(),
                          mu * gy * normal.x() + lam * gx * normal.y());
        const Vec2 trac_y(mu * gx * normal.y() + lam * gy * normal.x(),
                          mu * gx * normal.x() + (2.0 * mu + lam) * gy * normal.y());
        for (int m = 0; m < tn; ++m) {
          for (int c = 0; c < 2; ++c) {
            const int dof = ops.layout.edge_trace_dofs(e, c)[static_cast<std::size_t>(m)];
            B(a, dof) += w * shape[m] * trac_x(c);
            B(nk + a, dof) += w * shape[m] * trac_y(c);
          }
        }
        C(0, a) += w * vals(a);
        C(1, nk + a) += w * vals(a);
      }
      for (int m = 0; m < tn; ++m)
        for (int c = 0; c < 2; ++c) {
          const int dof = ops.layout.edge_trace_dofs(e, c)[static_cast<std::size_t>(m)];
          Cd(c, dof) += w * shape[m];
          Cd(2, dof) += w * shape[m] * tangent(c);
        }
    }
  }

  if (k == 2) {
    for (int a = 0; a < nk; ++a) {
      const auto [ax, ay] = monomial_exponent(a);
      // second derivatives of degree <= 2 monomials are constants
      const double dxx = (ax == 2 && ay == 0) ? 2.0 / (h * h) : 0.0;
      const double dyy = (ax == 0 && ay == 2) ? 2.0 / (h * h) : 0.0;
      const double dxy = (ax == 1 && ay == 1) ? 1.0 / (h * h) : 0.0;
      const double lap = dxx + dyy;
      const Vec2 div_sigma_x(mu * lap + (mu + lam) * dxx, (mu + lam) * dxy);
      const Vec2 div_sigma_y((mu + lam) * dxy, mu * lap + (mu + lam) * dyy);
      for (int c = 0; c < 2; ++c) {
        B(a, ops.layout.moment_dof(c)) -= ops.area * div_sigma_x(c);
        B(nk + a, ops.layout.moment_dof(c)) -= ops.area * div_sigma_y(c);
      }
    }
  }

  // rot constraint row: int_E rot p_beta from monomial moments
  for (int a = 0; a < nk; ++a) {
    const auto [ax, ay] = monomial_exponent(a);
    if (ay >= 1) C(2, a) = -ay / h * moment_of(mom, ax, ay - 1);
    if (ax >= 1) C(2, nk + a) = ax / h * moment_of(mom, ax - 1, ay);
  }

  // Bordered system: the Galerkin rows are rank deficient by exactly the
  // three rigid modes, which the boundary-average and rot constraints fix.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n2 + 3, n2 + 3);
  A.topLeftCorner(n2, n2) = G;
  A.topRightCorner(n2, 3) = C.transpose();
  A.bottomLeftCorner(3, n2) = C;
  Eigen::MatrixXd rhs(n2 + 3, nd);
  rhs.topRows(n2) = B;
  rhs.bottomRows(3) = Cd;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw numerical_error("element_operators: singular projector system (degenerate cell)");
  const Eigen::MatrixXd X = lu.solve(rhs);
  ops.pi_star = X.topRows(n2);

  const double residual = (C * ops.pi_star - Cd).cwiseAbs().maxCoeff();
  if (residual > 1e-9 * std::max(1.0, ops.perimeter))
    throw numerical_error("element_operators: constraint residual " +
                          std::to_string(residual) + " above gate");

  ops.pi_dof = D * ops.pi_star;

  if (k == 1) {
    ops.pi0_k = ops.pi_star;
    ops.pi0_1 = ops.pi_star;
    ops.pi0_km2.resize(0, nd);
  } else {
    // Moments of a virtual function against every vector monomial: means come
    // straight from the internal DOFs, the rest through the enhancement
    // identity using the energy projection.
    Eigen::MatrixXd mu_mat = Eigen::MatrixXd::Zero(n2, nd);
    for (int c = 0; c < 2; ++c) mu_mat(c * nk, ops.layout.moment_dof(c)) = ops.area;
    for (int a = 1; a < nk; ++a) {
      const double za = mom(a) / ops.area;  // projection of m_a onto constants
      for (int c = 0; c < 2; ++c) {
        Eigen::RowVectorXd row = za * mu_mat.row(c * nk);
        for (int al = 0; al < nk; ++al)
          row += ops.pi_star.row(c * nk + al) * (H(al, a) - za * H(al, 0));
        mu_mat.row(c * nk + a) = row;
      }
    }
    const Eigen::LDLT<Eigen::MatrixXd> hfac(H);
    const Eigen::LDLT<Eigen::MatrixXd> h1fac(H.topLeftCorner(3, 3));
    ops.pi0_k.resize(n2, nd);
    ops.pi0_1.resize(6, nd);
    for (int c = 0; c < 2; ++c) {
      const Eigen::MatrixXd block = hfac.solve(mu_mat.middleRows(c * nk, nk));
      ops.pi0_k.middleRows(c * nk, nk) = block;
      ops.pi0_1.middleRows(c * 3, 3) = h1fac.solve(H.topRows(3) * block);
    }
    ops.pi0_km2 = Eigen::MatrixXd::Zero(2, nd);
    for (int c = 0; c < 2; ++c) ops.pi0_km2(c, ops.layout.moment_dof(c)) = 1.0;
  }
  return ops;
}

Eigen::MatrixXd stab_derivative(const Polygon& cell, const DofLayout& layout) {
  const int nv = layout.n_vertices;
  const int k = layout.degree;
  const int tn = k + 1;
  const double h = polygon_diameter(cell);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(layout.n_dofs(), layout.n_dofs());

  // reference matrix of tangential-derivative products, int_0^1 L'_i L'_j dt
  Eigen::MatrixXd dref = Eigen::MatrixXd::Zero(tn, tn);
  const GaussRule& gr = gauss_legendre(k + 1);
  for (int g = 0; g < gr.x.size(); ++g) {
    const double t = 0.5 * (1.0 + gr.x(g));
    double dval[3];
    trace_shape(k, t, nullptr, dval);
    for (int i = 0; i < tn; ++i)
      for (int j = 0; j < tn; ++j) dref(i, j) += 0.5 * gr.w(g) * dval[i] * dval[j];
  }

  for (int e = 0; e < nv; ++e) {
    const double len =
        (cell[static_cast<std::size_t>((e + 1) % nv)] - cell[static_cast<std::size_t>(e)]).norm();
    for (int c = 0; c < 2; ++c) {
      const std::vector<int> dofs = layout.edge_trace_dofs(e, c);
      for (int i = 0; i < tn; ++i)
        for (int j = 0; j < tn; ++j)
          S(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]) +=
              h / len * dref(i, j);
    }
  }
  return S;
}

// Unscaled dofi-dofi product. For k = 1 the DOFs are exactly the vertex
// values, so this is the plain sum of vertex-value products; for k = 2 the
// edge and moment DOFs are included as well, since a vertex-only product is
// rank deficient on polygons with six or more edges.
Eigen::MatrixXd stab_classic(const DofLayout& layout) {
  return Eigen::MatrixXd::Identity(layout.n_dofs(), layout.n_dofs());
}

Eigen::MatrixXd local_stiffness(const Polygon& cell, const LocalOperators& ops,
                                StabKind stab) {
  const int nd = ops.layout.n_dofs();
  const Eigen::MatrixXd S = stab == StabKind::derivative
                                ? stab_derivative(cell, ops.layout)
                                : stab_classic(ops.layout);
  const Eigen::MatrixXd one_minus_pi =
      Eigen::MatrixXd::Identity(nd, nd) - ops.pi_dof;
  Eigen::MatrixXd K = ops.pi_star.transpose() * ops.stiffness_monomial * ops.pi_star +
                      one_minus_pi.transpose() * S * one_minus_pi;

  const double kmax = K.cwiseAbs().maxCoeff();
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-11 * kmax)
    throw numerical_error("local_stiffness: asymmetry " + std::to_string(asym / kmax) +
                          " relative, above 1e-11");
  K = 0.5 * (K + K.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double lmax = ev(nd - 1);
  if (!(lmax > 0) || ev(0) < -1e-11 * lmax)
    throw numerical_error("local_stiffness: negative eigenvalue " +
                          std::to_string(ev(0)));
  int near_kernel = 0;
  for (int i = 0; i < nd; ++i)
    if (ev(i) < 1e-9 * lmax) ++near_kernel;
  if (near_kernel != 3)
    throw numerical_error("local_stiffness: rigid kernel has dimension " +
                          std::to_string(near_kernel) + ", expected 3");
  return K;
}

Eigen::VectorXd local_load(const Polygon& cell, const LocalOperators& ops,
                           const Material& material, const VectorField& f) {
  const int k = ops.layout.degree;
  const QuadratureRule rule = polygon_quadrature(cell, 2 * k + 2);
  const ScaledMonomialBasis p1{ops.basis.center, ops.basis.scale, 1};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(6);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2 fval = material.density * f(rule.points[q]);
    const Eigen::VectorXd vals = eval_basis(p1, rule.points[q]);
    const double wq = rule.weights(static_cast<long>(q));
    for (int a = 0; a < 3; ++a) {
      w(a) += wq * fval.x() * vals(a);
      w(3 + a) += wq * fval.y() * vals(a);
    }
  }
  return ops.pi0_1.transpose() * w;
}

Eigen::VectorXd interpolate_local(const Polygon& cell, int degree,
                                  const VectorField& u) {
  const int nv = static_cast<int>(cell.size());
  const DofLayout layout = DofLayout::make(degree, nv);
  Eigen::VectorXd dofs(layout.n_dofs());
  for (int i = 0; i < nv; ++i) {
    const Vec2 val = u(cell[static_cast<std::size_t>(i)]);
    dofs(layout.vertex_dof(i, 0)) = val.x();
    dofs(layout.vertex_dof(i, 1)) = val.y();
  }
  if (degree == 2) {
    for (int e = 0; e < nv; ++e) {
      const Vec2 mid =
          0.5 * (cell[static_cast<std::size_t>(e)] + cell[static_cast<std::size_t>((e + 1) % nv)]);
      const Vec2 val = u(mid);
      dofs(layout.edge_dof(e, 0)) = val.x();
      dofs(layout.edge_dof(e, 1)) = val.y();
    }
    const QuadratureRule rule = polygon_quadrature(cell, 2 * degree + 2);
    Vec2 mean = Vec2::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      mean += rule.weights(static_cast<long>(q)) * u(rule.points[q]);
    mean /= polygon_area(cell);
    dofs(layout.moment_dof(0)) = mean.x();
    dofs(layout.moment_dof(1)) = mean.y();
  }
  return dofs;
}

Eigen::VectorXd edge_l2_projector(double length, const Eigen::VectorXd& node_values,
                                  int target_degree) {
  if (!(length > 0)) throw std::invalid_argument("edge_l2_projector: zero-length edge");
  if (target_degree < 0 || target_degree > 1)
    throw std::invalid_argument("edge_l2_projector: target degree must be 0 or 1");
  const int k = static_cast<int>(node_values.size()) - 1;
  if (k != 1 && k != 2)
    throw std::invalid_argument("edge_l2_projector: trace must have 2 or 3 nodes");
  // Legendre-style basis {1, 2t-1} on the unit parameter; masses 1 and 1/3.
  const GaussRule& gr = gauss_legendre(3);
  double c0 = 0, c1 = 0;
  for (int g = 0; g < gr.x.size(); ++g) {
    const double t = 0.5 * (1.0 + gr.x(g));
    double shape[3];
    trace_shape(k, t, shape, nullptr);
    double tau = 0;
    for (int m = 0; m <= k; ++m) tau += node_values(m) * shape[m];
    c0 += 0.5 * gr.w(g) * tau;
    c1 += 0.5 * gr.w(g) * tau * (2.0 * t - 1.0);
  }
  Eigen::VectorXd coeff(target_degree + 1);
  coeff(0) = c0;
  if (target_degree == 1) coeff(1) = 3.0 * c1;
  return coeff;
}

double triple_norm(const Polygon& cell, const LocalOperators& ops,
                   const Eigen::VectorXd& dofs) {
  const DofLayout& layout = ops.layout;
  const int k = layout.degree;
  double total = 0;
  if (k == 2) {
    const double mx = dofs(layout.moment_dof(0));
    const double my = dofs(layout.moment_dof(1));
    total += ops.area * (mx * mx + my * my);
  }
  double edge_sum = 0;
  for (int e = 0; e < layout.n_edges(); ++e) {
    const double len =
        (cell[static_cast<std::size_t>((e + 1) % layout.n_vertices)] -
         cell[static_cast<std::size_t>(e)]).norm();
    for (int c = 0; c < 2; ++c) {
      const std::vector<int> tdofs = layout.edge_trace_dofs(e, c);
      Eigen::VectorXd values(tdofs.size());
      for (std::size_t m = 0; m < tdofs.size(); ++m) values(static_cast<long>(m)) = dofs(tdofs[m]);
      const Eigen::VectorXd coeff = edge_l2_projector(len, values, k - 1);
      double norm2 = coeff(0) * coeff(0);
      if (coeff.size() > 1) norm2 += coeff(1) * coeff(1) / 3.0;
      edge_sum += len * norm2;
    }
  }
  total += ops.basis.scale * edge_sum;
  return std::sqrt(total);
}

std::array<Eigen::VectorXd, 3> rigid_modes(const Polygon& cell, int degree) {
  const Vec2 c = polygon_centroid(cell);
  const VectorField tx = [](const Vec2&) { return Vec2(1, 0); };
  const VectorField ty = [](const Vec2&) { return Vec2(0, 1); };
  const VectorField rot = [c](const Vec2& p) {
    return Vec2(-(p.y() - c.y()), p.x() - c.x());
  };
  return {interpolate_local(cell, degree, tx), interpolate_local(cell, degree, ty),
          interpolate_local(cell, degree, rot)};
}

}  // namespace vem
