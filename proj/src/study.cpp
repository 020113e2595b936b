#include "vem/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace vem {

namespace {

constexpr double kPi = std::numbers::pi;

ManufacturedSolution make_sine(const Material& mat) {
  const double mu = mat.mu, lam = mat.lambda, rho = mat.density;
  ManufacturedSolution s;
  s.id = "sine";
  s.u = [](const Vec2& p) {
    const double v = std::sin(kPi * p.x()) * std::sin(kPi * p.y());
    return Vec2(v, v);
  };
  s.grad_u = [](const Vec2& p) {
    const double gx = kPi * std::cos(kPi * p.x()) * std::sin(kPi * p.y());
    const double gy = kPi * std::sin(kPi * p.x()) * std::cos(kPi * p.y());
    Eigen::Matrix2d g;
    g << gx, gy, gx, gy;
    return g;
  };
  s.f = [mu, lam, rho](const Vec2& p) {
    const double ss = std::sin(kPi * p.x()) * std::sin(kPi * p.y());
    const double cc = std::cos(kPi * p.x()) * std::cos(kPi * p.y());
    const double val = kPi * kPi / rho * (2.0 * mu * ss - (mu + lam) * (cc - ss));
    return Vec2(val, val);
  };
  return s;
}

ManufacturedSolution make_poly3(const Material& mat) {
  const double mu = mat.mu, lam = mat.lambda, rho = mat.density;
  ManufacturedSolution s;
  s.id = "poly3";
  // u1 = x(1-x) y(1-y), u2 = x^2(1-x) y(1-y); both vanish on the unit square.
  auto A = [](double x) { return x - x * x; };
  auto dA = [](double x) { return 1.0 - 2.0 * x; };
  auto B = [](double y) { return y - y * y; };
  auto dB = [](double y) { return 1.0 - 2.0 * y; };
  auto C = [](double x) { return x * x - x * x * x; };
  auto dC = [](double x) { return 2.0 * x - 3.0 * x * x; };
  s.u = [=](const Vec2& p) { return Vec2(A(p.x()) * B(p.y()), C(p.x()) * B(p.y())); };
  s.grad_u = [=](const Vec2& p) {
    Eigen::Matrix2d g;
    g << dA(p.x()) * B(p.y()), A(p.x()) * dB(p.y()),
         dC(p.x()) * B(p.y()), C(p.x()) * dB(p.y());
    return g;
  };
  s.f = [=](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const double lap1 = -2.0 * B(y) - 2.0 * A(x);
    const double lap2 = (2.0 - 6.0 * x) * B(y) - 2.0 * C(x);
    const double ddiv_x = -2.0 * B(y) + dC(x) * dB(y);
    const double ddiv_y = dA(x) * dB(y) - 2.0 * C(x);
    return Vec2(-(mu * lap1 + (mu + lam) * ddiv_x) / rho,
                -(mu * lap2 + (mu + lam) * ddiv_y) / rho);
  };
  return s;
}

// u = curl(psi) with psi = (1/pi) sin^2(pi x) sin^2(pi y): exactly
// divergence free, so the load is independent of lambda and the error is a
// clean probe of near-incompressible behavior.
ManufacturedSolution make_divfree(const Material& mat) {
  const double mu = mat.mu, rho = mat.density;
  ManufacturedSolution s;
  s.id = "divfree";
  s.u = [](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
    const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y());
    return Vec2(2.0 * sx * sx * sy * cy, -2.0 * sx * cx * sy * sy);
  };
  s.grad_u = [](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
    const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y());
    Eigen::Matrix2d g;
    g(0, 0) = 4.0 * kPi * sx * cx * sy * cy;
    g(0, 1) = 2.0 * kPi * sx * sx * (cy * cy - sy * sy);
    g(1, 0) = -2.0 * kPi * (cx * cx - sx * sx) * sy * sy;
    g(1, 1) = -4.0 * kPi * sx * cx * sy * cy;
    return g;
  };
  s.f = [mu, rho](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
    const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y());
    const double pi2 = kPi * kPi;
    const double lap1 =
        4.0 * pi2 * (cx * cx - sx * sx) * sy * cy - 8.0 * pi2 * sx * sx * sy * cy;
    const double lap2 =
        8.0 * pi2 * sx * cx * sy * sy - 4.0 * pi2 * sx * cx * (cy * cy - sy * sy);
    return Vec2(-mu / rho * lap1, -mu / rho * lap2);
  };
  return s;
}

}  // namespace

ManufacturedSolution manufactured(const std::string& id, const Material& material) {
  if (id == "sine") return make_sine(material);
  if (id == "poly3") return make_poly3(material);
  if (id == "divfree") return make_divfree(material);
  throw std::invalid_argument("manufactured: unknown solution id '" + id +
                              "' (sine | poly3 | divfree)");
}

std::pair<double, double> error_norms(const Mesh& mesh, const GlobalDofMap& map,
                                      int degree, const Material& material,
                                      const ManufacturedSolution& solution,
                                      const Eigen::VectorXd& u) {
  double l2 = 0, h1 = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    const LocalOperators ops = element_operators(poly, material, degree);
    const std::vector<int>& cd = map.cell_dofs[static_cast<std::size_t>(c)];
    Eigen::VectorXd local(cd.size());
    for (std::size_t i = 0; i < cd.size(); ++i) local(static_cast<long>(i)) = u(cd[i]);
    const Eigen::VectorXd coeff = ops.pi_star * local;
    const int nk = ops.basis.size();

    const QuadratureRule rule = polygon_quadrature(poly, 2 * degree + 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2& p = rule.points[q];
      const double w = rule.weights(static_cast<long>(q));
      const Eigen::VectorXd vals = eval_basis(ops.basis, p);
      const Eigen::MatrixX2d grads = eval_basis_grad(ops.basis, p);
      const Vec2 uh(coeff.head(nk).dot(vals), coeff.tail(nk).dot(vals));
      Eigen::Matrix2d gh;
      gh.row(0) = coeff.head(nk).transpose() * grads;
      gh.row(1) = coeff.tail(nk).transpose() * grads;
      const Vec2 du = solution.u(p) - uh;
      const Eigen::Matrix2d dg = solution.grad_u(p) - gh;
      l2 += w * du.squaredNorm();
      h1 += w * dg.squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

std::pair<double, double> exact_norms(const Mesh& mesh, int degree,
                                      const ManufacturedSolution& solution) {
  double l2 = 0, h1 = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const QuadratureRule rule =
        polygon_quadrature(mesh.cell_polygon(c), 2 * degree + 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights(static_cast<long>(q));
      l2 += w * solution.u(rule.points[q]).squaredNorm();
      h1 += w * solution.grad_u(rule.points[q]).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

void compute_rates(std::vector<StudyRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rate_l2 = std::numeric_limits<double>::quiet_NaN();
    rows[i].rate_h1 = std::numeric_limits<double>::quiet_NaN();
    if (i == 0) continue;
    const StudyRow& prev = rows[i - 1];
    StudyRow& cur = rows[i];
    const double dh = std::log(prev.h / cur.h);
    if (!(dh > 0)) continue;
    if (prev.err_l2 > 0 && cur.err_l2 > 0)
      cur.rate_l2 = std::log(prev.err_l2 / cur.err_l2) / dh;
    if (prev.err_h1 > 0 && cur.err_h1 > 0)
      cur.rate_h1 = std::log(prev.err_h1 / cur.err_h1) / dh;
  }
}

std::vector<StudyRow> run_study(const StudyConfig& config) {
  if (config.levels.empty())
    throw std::invalid_argument("run_study: levels list is empty");
  for (std::size_t i = 1; i < config.levels.size(); ++i)
    if (config.levels[i] <= config.levels[i - 1])
      throw std::invalid_argument("run_study: levels must be strictly increasing");
  if (config.solution == "poly3" && config.domain != Domain::unit_square)
    throw std::invalid_argument("run_study: poly3 is defined on the unit square only");

  const Material material = make_material(config.young, config.poisson, config.density);
  const ManufacturedSolution solution = manufactured(config.solution, material);
  const VectorField zero = [](const Vec2&) { return Vec2::Zero(); };

  std::vector<StudyRow> rows;
  for (const int level : config.levels) {
    try {
      Mesh mesh = generate_mesh(config.domain, config.kind, level, config.seed);
      if (config.small_edges) mesh = split_edges_small(mesh, config.edge_fraction);
      const GlobalDofMap map = build_dof_map(mesh, config.degree);
      const SparseSystem system =
          assemble(mesh, map, material, config.degree, config.stab, solution.f);
      const ReducedSystem reduced = apply_dirichlet(system, map, zero);
      const Solution sol = solve(reduced);
      const auto [l2, h1] =
          error_norms(mesh, map, config.degree, material, solution, sol.u);
      StudyRow row;
      row.level = level;
      row.h = mesh_metrics(mesh).h;
      row.ndof = map.n_dofs;
      row.err_l2 = l2;
      row.err_h1 = h1;
      rows.push_back(row);
    } catch (const numerical_error& err) {
      throw numerical_error("level " + std::to_string(level) + ": " + err.what());
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("level " + std::to_string(level) + ": " + err.what());
    }
  }
  compute_rates(rows);
  if (!config.out_csv.empty()) {
    std::ofstream out(config.out_csv, std::ios::binary);
    if (!out) throw std::invalid_argument("run_study: cannot open " + config.out_csv);
    out << rows_to_csv(rows);
  }
  return rows;
}

std::string rows_to_csv(const std::vector<StudyRow>& rows) {
  std::string csv = "level,h,ndof,err_l2,err_h1,rate_l2,rate_h1\n";
  char buf[256];
  for (const StudyRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g,%.17g", r.level, r.h,
                  r.ndof, r.err_l2, r.err_h1);
    csv += buf;
    for (const double rate : {r.rate_l2, r.rate_h1}) {
      if (std::isnan(rate)) {
        csv += ",";
      } else {
        std::snprintf(buf, sizeof(buf), ",%.17g", rate);
        csv += buf;
      }
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace vem
