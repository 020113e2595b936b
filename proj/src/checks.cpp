#include "vem/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vem {

namespace {

double uniform01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

Polygon split_polygon_edges(const Polygon& p, double fraction) {
  Polygon out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    out.push_back(a);
    out.push_back(a + fraction * (b - a));
  }
  return out;
}

Polygon random_cell(std::mt19937_64& rng, int variant) {
  Polygon p;
  switch (variant % 3) {
    case 0: {  // star-shaped n-gon: sorted angles, jittered radii
      const int n = 3 + static_cast<int>(uniform01(rng) * 8);
      std::vector<double> angles;
      for (int i = 0; i < n; ++i)
        angles.push_back(2.0 * std::numbers::pi * (i + 0.2 + 0.6 * uniform01(rng)) / n);
      for (double a : angles) {
        const double r = uniform(rng, 0.55, 1.0);
        p.emplace_back(r * std::cos(a), r * std::sin(a));
      }
      break;
    }
    case 1: {  // rectangle, possibly thin
      const double aspect = uniform(rng, 0.2, 1.0);
      p = {Vec2(0, 0), Vec2(1, 0), Vec2(1, aspect), Vec2(0, aspect)};
      break;
    }
    default: {  // triangle
      p = {Vec2(0, 0), Vec2(1, uniform(rng, -0.2, 0.2)),
           Vec2(uniform(rng, 0.2, 0.8), uniform(rng, 0.6, 1.2))};
      break;
    }
  }
  if (variant % 2 == 0) p = split_polygon_edges(p, 0.02);
  const double scale = std::pow(10.0, uniform(rng, -2.0, 1.0));
  const Vec2 shift(uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0));
  for (Vec2& v : p) v = scale * v + shift;
  return p;
}

struct Accumulator {
  Accumulator(std::string name_, double gate_)
      : name(std::move(name_)), gate(gate_) {}

  std::string name;
  double gate = 0;
  double worst = 0;
  bool ok = true;
  std::string detail;

  void feed(double value, const std::string& where) {
    if (value > worst) {
      worst = value;
      detail = where;
    }
    if (!(value <= gate)) ok = false;
  }
  void fail(const std::string& why) {
    ok = false;
    detail = why;
  }
  CheckResult result() const { return {name, ok, worst, gate, detail}; }
};

VectorField monomial_field(const ScaledMonomialBasis& basis, int comp, int a) {
  return [basis, comp, a](const Vec2& p) {
    const double v = eval_basis(basis, p)(a);
    return comp == 0 ? Vec2(v, 0) : Vec2(0, v);
  };
}

// a^E(p_a, p_b) between vector monomials by direct quadrature, the
// independent route against the moment-built Gram matrix.
Eigen::MatrixXd energy_by_quadrature(const Polygon& cell,
                                     const ScaledMonomialBasis& basis,
                                     const Material& mat) {
  const int nk = basis.size();
  const int n2 = 2 * nk;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n2, n2);
  const QuadratureRule rule = polygon_quadrature(cell, std::max(2 * basis.degree - 2, 1));
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double w = rule.weights(static_cast<long>(q));
    const Eigen::MatrixX2d grad = eval_basis_grad(basis, rule.points[q]);
    for (int ca = 0; ca < 2; ++ca)
      for (int a = 0; a < nk; ++a) {
        Eigen::Matrix2d ea = Eigen::Matrix2d::Zero();
        ea.row(ca) = grad.row(a);
        const Eigen::Matrix2d sa = ea + ea.transpose();  // 2 eps(p_a)
        for (int cb = 0; cb < 2; ++cb)
          for (int b = 0; b < nk; ++b) {
            Eigen::Matrix2d eb = Eigen::Matrix2d::Zero();
            eb.row(cb) = grad.row(b);
            const Eigen::Matrix2d sb = eb + eb.transpose();
            const double dot = 0.25 * (sa.array() * sb.array()).sum();
            const double val =
                2.0 * mat.mu * dot + mat.lambda * sa.trace() * 0.5 * sb.trace() * 0.5;
            M(ca * nk + a, cb * nk + b) += w * val;
          }
      }
  }
  return M;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed, int n_cells) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  const double nus[] = {0.3, 0.4, 0.45, 0.49};

  Accumulator quad_mom("quadrature vs moments", 1e-12);
  Accumulator repro("projector polynomial reproduction", 1e-10);
  Accumulator idem("projector idempotence", 1e-10);
  Accumulator constr("boundary-average and rot constraints", 1e-10);
  Accumulator kernel("stiffness symmetry and rigid kernel", 1e-11);
  Accumulator consist("stiffness consistency oracle", 1e-10);
  // load resultants inherit the projector's reproduction accuracy, so the
  // randomized sweep shares its gate; the op-level 1e-12 example lives in the
  // unit tests on canonical cells
  Accumulator pou("load partition of unity", 1e-10);
  Accumulator fdload("manufactured load vs finite differences", 1e-5);

  for (int i = 0; i < n_cells; ++i) {
    const Polygon cell = random_cell(rng, i);
    const int k = 1 + i % 2;
    const Material mat = make_material(1.0, nus[i % 4]);
    const std::string where = "cell " + std::to_string(i) + " (k=" + std::to_string(k) + ")";

    LocalOperators ops;
    try {
      ops = element_operators(cell, mat, k);
    } catch (const std::exception& err) {
      repro.fail(where + ": " + err.what());
      continue;
    }
    const int nk = ops.basis.size();
    const int nd = ops.layout.n_dofs();

    {  // two independent integration paths must agree
      const ScaledMonomialBasis b2{ops.basis.center, ops.basis.scale, 2 * k};
      const Eigen::VectorXd mom = polygon_monomial_moments(cell, b2, 2 * k);
      const QuadratureRule rule = polygon_quadrature(cell, 2 * k);
      Eigen::VectorXd viaquad = Eigen::VectorXd::Zero(mom.size());
      for (std::size_t q = 0; q < rule.points.size(); ++q)
        viaquad += rule.weights(static_cast<long>(q)) * eval_basis(b2, rule.points[q]);
      const double scale = std::max(mom.cwiseAbs().maxCoeff(), ops.area);
      quad_mom.feed((viaquad - mom).cwiseAbs().maxCoeff() / scale, where);
    }

    {  // reproduction and idempotence
      double worst = 0;
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < nk; ++a) {
          const Eigen::VectorXd dofs =
              interpolate_local(cell, k, monomial_field(ops.basis, c, a));
          Eigen::VectorXd expect = Eigen::VectorXd::Zero(2 * nk);
          expect(c * nk + a) = 1.0;
          worst = std::max(worst,
                           (ops.pi_star * dofs - expect).cwiseAbs().maxCoeff());
          worst = std::max(worst,
                           (ops.pi0_k * dofs - expect).cwiseAbs().maxCoeff());
        }
      repro.feed(worst, where);
      const double pnorm = std::max(1.0, ops.pi_dof.cwiseAbs().maxCoeff());
      idem.feed((ops.pi_dof * ops.pi_dof - ops.pi_dof).cwiseAbs().maxCoeff() / pnorm,
                where);
    }

    {  // constraint residuals on random DOF vectors, via direct edge quadrature
      const int nv = static_cast<int>(cell.size());
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(nd);
        for (int j = 0; j < nd; ++j) v(j) = uniform(rng, -1.0, 1.0);
        const Eigen::VectorXd coeff = ops.pi_star * v;
        Vec2 avg = Vec2::Zero();
        double rot = 0;
        const GaussRule& gr = gauss_legendre(k + 2);
        for (int e = 0; e < nv; ++e) {
          const Vec2& pa = cell[static_cast<std::size_t>(e)];
          const Vec2& pb = cell[static_cast<std::size_t>((e + 1) % nv)];
          const double len = (pb - pa).norm();
          const Vec2 tangent = (pb - pa) / len;
          for (int g = 0; g < gr.x.size(); ++g) {
            const double t = 0.5 * (1.0 + gr.x(g));
            const double w = 0.5 * gr.w(g) * len;
            const Vec2 p = pa + t * (pb - pa);
            const Eigen::VectorXd vals = eval_basis(ops.basis, p);
            const Vec2 proj(coeff.head(nk).dot(vals), coeff.tail(nk).dot(vals));
            double shape[3];
            Vec2 trace = Vec2::Zero();
            const int tn = k + 1;
            if (k == 1) {
              shape[0] = 1.0 - t;
              shape[1] = t;
            } else {
              shape[0] = (1.0 - t) * (1.0 - 2.0 * t);
              shape[1] = 4.0 * t * (1.0 - t);
              shape[2] = t * (2.0 * t - 1.0);
            }
            for (int c = 0; c < 2; ++c) {
              const std::vector<int> tdofs = ops.layout.edge_trace_dofs(e, c);
              for (int m = 0; m < tn; ++m)
                trace(c) += shape[m] * v(tdofs[static_cast<std::size_t>(m)]);
            }
            avg += w * (trace - proj);
            rot += w * (trace - proj).dot(tangent);
          }
        }
        const double scale = std::max(1.0, ops.perimeter) * v.norm();
        constr.feed(std::max({std::abs(avg.x()), std::abs(avg.y()), std::abs(rot)}) /
                        scale,
                    where);
      }
    }

    for (const StabKind stab : {StabKind::derivative, StabKind::classic}) {
      Eigen::MatrixXd K;
      try {
        K = local_stiffness(cell, ops, stab);
      } catch (const std::exception& err) {
        kernel.fail(where + ": " + err.what());
        continue;
      }
      const double kmax = K.cwiseAbs().maxCoeff();
      const auto modes = rigid_modes(cell, k);
      double worst = 0;
      for (const Eigen::VectorXd& r : modes)
        worst = std::max(worst, (K * r).cwiseAbs().maxCoeff() /
                                    (kmax * r.cwiseAbs().maxCoeff()));
      kernel.feed(worst, where);

      // dof(p)^T K dof(q) against direct integration of the elastic energy
      Eigen::MatrixXd dofP(nd, 2 * nk);
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < nk; ++a)
          dofP.col(c * nk + a) =
              interpolate_local(cell, k, monomial_field(ops.basis, c, a));
      const Eigen::MatrixXd direct = energy_by_quadrature(cell, ops.basis, mat);
      const double scale = std::max(direct.cwiseAbs().maxCoeff(), 1e-300);
      consist.feed(((dofP.transpose() * K * dofP) - direct).cwiseAbs().maxCoeff() /
                       scale,
                   where);
    }

    {  // constant-load resultant against rigid translations
      const Vec2 cval(0.7, -0.3);
      const VectorField f = [cval](const Vec2&) { return cval; };
      const Eigen::VectorXd F = local_load(cell, ops, mat, f);
      const auto modes = rigid_modes(cell, k);
      for (int c = 0; c < 2; ++c) {
        const double got = modes[static_cast<std::size_t>(c)].dot(F);
        const double expect = mat.density * cval(c) * ops.area;
        pou.feed(std::abs(got - expect) /
                     std::max(std::abs(expect), mat.density * ops.area),
                 where);
      }
    }
  }

  {  // manufactured loads against second-order finite differences of the strong form
    const double step = 1e-5;
    for (const char* id : {"sine", "poly3"}) {
      for (const double nu : {0.35, 0.49}) {
        const Material mat = make_material(1.0, nu);
        const ManufacturedSolution sol = manufactured(id, mat);
        for (int trial = 0; trial < 5; ++trial) {
          const Vec2 p(uniform(rng, 0.15, 0.85), uniform(rng, 0.15, 0.85));
          auto u = sol.u;
          const Vec2 uc = u(p);
          const Vec2 dxx = (u(p + Vec2(step, 0)) - 2 * uc + u(p - Vec2(step, 0))) /
                           (step * step);
          const Vec2 dyy = (u(p + Vec2(0, step)) - 2 * uc + u(p - Vec2(0, step))) /
                           (step * step);
          const Vec2 dxy = (u(p + Vec2(step, step)) - u(p + Vec2(step, -step)) -
                            u(p + Vec2(-step, step)) + u(p + Vec2(-step, -step))) /
                           (4 * step * step);
          const Vec2 lap = dxx + dyy;
          const Vec2 grad_div(dxx.x() + dxy.y(), dxy.x() + dyy.y());
          const Vec2 div_sigma = mat.mu * lap + (mat.mu + mat.lambda) * grad_div;
          const Vec2 f_num = -div_sigma / mat.density;
          const Vec2 f_exact = sol.f(p);
          fdload.feed((f_num - f_exact).norm() / std::max(f_exact.norm(), 1.0),
                      std::string(id) + " nu=" + std::to_string(nu));
        }
      }
    }
  }

  return {quad_mom.result(), repro.result(),  idem.result(),   constr.result(),
          kernel.result(),   consist.result(), pou.result(),    fdload.result()};
}

std::vector<CheckResult> run_patch_checks(int level) {
  std::vector<CheckResult> out;
  const Material mat = make_material(1.0, 0.3);

  for (const int k : {1, 2}) {
    // exact solution of degree k with a constant (k=2) or zero (k=1) load
    ManufacturedSolution exact;
    if (k == 1) {
      exact.u = [](const Vec2& p) {
        return Vec2(0.25 + 2.0 * p.x() - 0.75 * p.y(),
                    -0.5 + 0.5 * p.x() + 1.5 * p.y());
      };
      exact.grad_u = [](const Vec2&) {
        Eigen::Matrix2d g;
        g << 2.0, -0.75, 0.5, 1.5;
        return g;
      };
      exact.f = [](const Vec2&) { return Vec2::Zero(); };
    } else {
      // u1 = x^2 + x y - y^2 + x, u2 = 0.5 y^2 - x y + 0.3 x^2 - y
      exact.u = [](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return Vec2(x * x + x * y - y * y + x,
                    0.5 * y * y - x * y + 0.3 * x * x - y);
      };
      exact.grad_u = [](const Vec2& p) {
        const double x = p.x(), y = p.y();
        Eigen::Matrix2d g;
        g << 2.0 * x + y + 1.0, x - 2.0 * y, -y + 0.6 * x, y - x - 1.0;
        return g;
      };
      // Hessians: H1 = [[2,1],[1,-2]], H2 = [[0.6,-1],[-1,1]]
      const double mu = mat.mu, lam = mat.lambda;
      const Vec2 lap(2.0 - 2.0, 0.6 + 1.0);
      const Vec2 grad_div(2.0 + (-1.0), 1.0 + 1.0);
      const Vec2 div_sigma = mu * lap + (mu + lam) * grad_div;
      const Vec2 fconst = -div_sigma / mat.density;
      exact.f = [fconst](const Vec2&) { return fconst; };
    }

    struct PatchMesh {
      MeshKind kind;
      bool split;
    };
    const PatchMesh meshes[] = {
        {MeshKind::triangles, false},
        {MeshKind::deformed_triangles_midpoints, false},
        {MeshKind::deformed_squares, false},
        {MeshKind::squares, false},
        {MeshKind::voronoi, false},
        {MeshKind::glued_voronoi, false},
        {MeshKind::triangles, true},  // the 1/50 small-edge split
    };
    for (const PatchMesh& pm : meshes) {
      const MeshKind kind = pm.kind;
      for (const StabKind stab : {StabKind::derivative, StabKind::classic}) {
        CheckResult r;
        r.name = "patch k=" + std::to_string(k) + " " + to_string(kind) +
                 (pm.split ? "+split" : "") + " " +
                 (stab == StabKind::derivative ? "dtangent" : "dofi");
        r.gate = 1e-9;
        try {
          Mesh mesh = generate_mesh(Domain::unit_square, kind, level, 2024);
          if (pm.split) mesh = split_edges_small(mesh, 0.02);
          const GlobalDofMap map = build_dof_map(mesh, k);
          const SparseSystem sys = assemble(mesh, map, mat, k, stab, exact.f);
          const ReducedSystem red = apply_dirichlet(sys, map, exact.u);
          const Solution sol = solve(red);
          const auto [el2, eh1] = error_norms(mesh, map, k, mat, exact, sol.u);
          const auto [nl2, nh1] = exact_norms(mesh, k, exact);
          r.worst = std::max(el2 / nl2, eh1 / nh1);
          r.pass = r.worst <= r.gate;
        } catch (const std::exception& err) {
          r.pass = false;
          r.detail = err.what();
        }
        out.push_back(r);
      }
    }
  }
  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace vem
