#include "vem/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "vem/geometry.hpp"

namespace vem {

std::pair<int, int> monomial_exponent(int idx) {
  int d = 0;
  while (monomial_count(d) <= idx) ++d;
  const int ay = idx - d * (d + 1) / 2;
  return {d - ay, ay};
}

int monomial_index(int ax, int ay) {
  const int d = ax + ay;
  return d * (d + 1) / 2 + ay;
}

Eigen::VectorXd eval_basis(const ScaledMonomialBasis& basis, const Vec2& p) {
  const int n = basis.size();
  const double xi = (p.x() - basis.center.x()) / basis.scale;
  const double eta = (p.y() - basis.center.y()) / basis.scale;
  Eigen::VectorXd powx(basis.degree + 1), powy(basis.degree + 1);
  powx(0) = powy(0) = 1.0;
  for (int d = 1; d <= basis.degree; ++d) {
    powx(d) = powx(d - 1) * xi;
    powy(d) = powy(d - 1) * eta;
  }
  Eigen::VectorXd out(n);
  for (int a = 0; a < n; ++a) {
    const auto [ax, ay] = monomial_exponent(a);
    out(a) = powx(ax) * powy(ay);
  }
  return out;
}

Eigen::MatrixX2d eval_basis_grad(const ScaledMonomialBasis& basis, const Vec2& p) {
  const int n = basis.size();
  const double xi = (p.x() - basis.center.x()) / basis.scale;
  const double eta = (p.y() - basis.center.y()) / basis.scale;
  Eigen::VectorXd powx(basis.degree + 1), powy(basis.degree + 1);
  powx(0) = powy(0) = 1.0;
  for (int d = 1; d <= basis.degree; ++d) {
    powx(d) = powx(d - 1) * xi;
    powy(d) = powy(d - 1) * eta;
  }
  Eigen::MatrixX2d out(n, 2);
  for (int a = 0; a < n; ++a) {
    const auto [ax, ay] = monomial_exponent(a);
    out(a, 0) = ax > 0 ? ax * powx(ax - 1) * powy(ay) / basis.scale : 0.0;
    out(a, 1) = ay > 0 ? ay * powx(ax) * powy(ay - 1) / basis.scale : 0.0;
  }
  return out;
}

namespace {

GaussRule compute_gauss(int n) {
  GaussRule r;
  if (n == 1) {
    r.x = Eigen::VectorXd::Zero(1);
    r.w = Eigen::VectorXd::Constant(1, 2.0);
    return r;
  }
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  r.x = es.eigenvalues();
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    r.w(i) = 2.0 * v * v;
  }
  return r;
}

constexpr int kMaxGauss = 24;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t;
    t.reserve(kMaxGauss);
    for (int i = 1; i <= kMaxGauss; ++i) t.push_back(compute_gauss(i));
    return t;
  }();
  if (n < 1 || n > kMaxGauss)
    throw std::invalid_argument("gauss_legendre: unsupported point count " +
                                std::to_string(n));
  return table[static_cast<std::size_t>(n - 1)];
}

Eigen::VectorXd polygon_monomial_moments(const Polygon& poly,
                                         const ScaledMonomialBasis& basis,
                                         int up_to_degree) {
  if (poly.size() < 3 || !(polygon_area(poly) > 0))
    throw numerical_error("polygon_monomial_moments: degenerate polygon");
  const int nm = monomial_count(up_to_degree);
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(nm);
  // int_E m_a = sum_e int_e h/(a1+1) xi^{a1+1} eta^{a2} n_x ds
  const int npts = (up_to_degree + 3) / 2 + 1;
  const GaussRule& gr = gauss_legendre(npts);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double dy = b.y() - a.y();
    if (dy == 0) continue;  // n_x vanishes on horizontal edges
    for (int g = 0; g < npts; ++g) {
      const Vec2 p = 0.5 * (a + b) + 0.5 * gr.x(g) * (b - a);
      const double xi = (p.x() - basis.center.x()) / basis.scale;
      const double eta = (p.y() - basis.center.y()) / basis.scale;
      Eigen::VectorXd powx(up_to_degree + 2), powy(up_to_degree + 1);
      powx(0) = powy(0) = 1.0;
      for (int d = 1; d <= up_to_degree + 1; ++d) powx(d) = powx(d - 1) * xi;
      for (int d = 1; d <= up_to_degree; ++d) powy(d) = powy(d - 1) * eta;
      const double common = 0.5 * gr.w(g) * dy * basis.scale;
      for (int m = 0; m < nm; ++m) {
        const auto [ax, ay] = monomial_exponent(m);
        mom(m) += common * powx(ax + 1) * powy(ay) / (ax + 1);
      }
    }
  }
  return mom;
}

namespace {

struct Triangle {
  Vec2 a, b, c;
};

// Fan triangulation about the centroid; valid when every edge is visible
// from it (all sub-triangles positively oriented).
bool fan_triangulate(const Polygon& poly, std::vector<Triangle>& out) {
  const Vec2 c = polygon_centroid(poly);
  const double area = polygon_area(poly);
  std::vector<Triangle> tris;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double twice = (q - p).x() * (c - p).y() - (q - p).y() * (c - p).x();
    if (!(twice > 1e-14 * area)) return false;
    tris.push_back({c, p, q});
  }
  out = std::move(tris);
  return true;
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  auto side = [](const Vec2& u, const Vec2& v, const Vec2& w) {
    return (v - u).x() * (w - u).y() - (v - u).y() * (w - u).x();
  };
  const double s1 = side(a, b, p);
  const double s2 = side(b, c, p);
  const double s3 = side(c, a, p);
  return s1 > 0 && s2 > 0 && s3 > 0;
}

std::vector<Triangle> ear_clip(Polygon poly) {
  std::vector<Triangle> tris;
  const double scale2 = polygon_diameter(poly);
  int guard = static_cast<int>(poly.size() * poly.size()) + 16;
  while (poly.size() > 3 && guard-- > 0) {
    bool clipped = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const std::size_t n = poly.size();
      const Vec2& prev = poly[(i + n - 1) % n];
      const Vec2& cur = poly[i];
      const Vec2& next = poly[(i + 1) % n];
      const double twice =
          (cur - prev).x() * (next - prev).y() - (cur - prev).y() * (next - prev).x();
      if (!(twice > 1e-14 * scale2 * scale2)) continue;  // reflex or flat corner
      bool blocked = false;
      for (std::size_t j = 0; j < n && !blocked; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        if (point_in_triangle(poly[j], prev, cur, next)) blocked = true;
      }
      if (blocked) continue;
      tris.push_back({prev, cur, next});
      poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) break;  // only flat corners left; drop one and retry
  }
  if (poly.size() == 3) {
    tris.push_back({poly[0], poly[1], poly[2]});
  } else if (poly.size() > 3) {
    throw numerical_error("polygon_quadrature: ear clipping failed");
  }
  return tris;
}

}  // namespace

QuadratureRule polygon_quadrature(const Polygon& poly, int order) {
  if (poly.size() < 3 || !(polygon_area(poly) > 0))
    throw numerical_error("polygon_quadrature: degenerate polygon");
  order = std::max(order, 1);

  QuadratureRule rule;
  std::vector<Triangle> tris;
  if (!fan_triangulate(poly, tris)) {
    tris = ear_clip(poly);
    rule.used_fallback = true;
  }

  // Collapsed tensor rule on each triangle: P(u,v) = A + u(B-A) + uv(C-B)
  // with Jacobian 2*|T|*u, exact for total degree `order`.
  const int nu = (order + 3) / 2;
  const int nv = (order + 2) / 2;
  const GaussRule& gu = gauss_legendre(nu);
  const GaussRule& gv = gauss_legendre(nv);
  std::vector<Vec2> pts;
  std::vector<double> wts;
  for (const Triangle& t : tris) {
    const double twice_area = (t.b - t.a).x() * (t.c - t.a).y() -
                              (t.b - t.a).y() * (t.c - t.a).x();
    for (int i = 0; i < nu; ++i) {
      const double u = 0.5 * (1.0 + gu.x(i));
      for (int j = 0; j < nv; ++j) {
        const double v = 0.5 * (1.0 + gv.x(j));
        pts.push_back(t.a + u * (t.b - t.a) + u * v * (t.c - t.b));
        wts.push_back(0.25 * gu.w(i) * gv.w(j) * u * twice_area);
      }
    }
  }
  rule.points = std::move(pts);
  rule.weights = Eigen::Map<Eigen::VectorXd>(wts.data(), static_cast<long>(wts.size()));
  return rule;
}

QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int order) {
  const double len = (b - a).norm();
  if (!(len > 0)) throw std::invalid_argument("edge_quadrature: zero-length segment");
  const int n = std::max(1, (order + 2) / 2);
  const GaussRule& gr = gauss_legendre(n);
  QuadratureRule rule;
  rule.points.reserve(static_cast<std::size_t>(n));
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (a + b) + 0.5 * gr.x(i) * (b - a));
    rule.weights(i) = 0.5 * gr.w(i) * len;
  }
  return rule;
}

}  // namespace vem
