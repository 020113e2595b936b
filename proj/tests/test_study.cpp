#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vem/study.hpp"

using namespace vem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// central second differences of the strong form, the independent oracle for
// every manufactured load
double fd_load_mismatch(const ManufacturedSolution& s, const Material& mat,
                        const Vec2& p) {
  const double step = 1e-5;
  const Vec2 uc = s.u(p);
  const Vec2 dxx = (s.u(p + Vec2(step, 0)) - 2 * uc + s.u(p - Vec2(step, 0))) / (step * step);
  const Vec2 dyy = (s.u(p + Vec2(0, step)) - 2 * uc + s.u(p - Vec2(0, step))) / (step * step);
  const Vec2 dxy = (s.u(p + Vec2(step, step)) - s.u(p + Vec2(step, -step)) -
                    s.u(p + Vec2(-step, step)) + s.u(p + Vec2(-step, -step))) /
                   (4 * step * step);
  const Vec2 lap = dxx + dyy;
  const Vec2 grad_div(dxx.x() + dxy.y(), dxy.x() + dyy.y());
  const Vec2 f_num = -(mat.mu * lap + (mat.mu + mat.lambda) * grad_div) / mat.density;
  const Vec2 f = s.f(p);
  return (f_num - f).norm() / std::max(f.norm(), 1.0);
}

}  // namespace

TEST_CASE("manufactured solutions: values and boundary compatibility") {
  const Material mat = make_material(1.0, 0.35);
  const ManufacturedSolution sine = manufactured("sine", mat);
  CHECK((sine.u(Vec2(0.5, 0.5)) - Vec2(1, 1)).norm() <= 1e-15);
  for (const Vec2& p : {Vec2(0, 0.3), Vec2(1, 0.7), Vec2(0.4, 0), Vec2(0.9, 1),
                        Vec2(1, 1.5), Vec2(1.7, 1), Vec2(2, 0.5), Vec2(0.3, 2)})
    CHECK(sine.u(p).norm() <= 1e-14);  // unit square and L-shape boundaries

  const ManufacturedSolution poly = manufactured("poly3", mat);
  for (const Vec2& p : {Vec2(0, 0.3), Vec2(1, 0.7), Vec2(0.4, 0), Vec2(0.9, 1)})
    CHECK(poly.u(p).norm() <= 1e-15);

  const ManufacturedSolution divfree = manufactured("divfree", mat);
  for (const Vec2& p : {Vec2(0, 0.3), Vec2(1, 0.7), Vec2(0.4, 0), Vec2(0.9, 1)})
    CHECK(divfree.u(p).norm() <= 1e-14);
  // div u vanishes identically
  for (const Vec2& p : {Vec2(0.3, 0.6), Vec2(0.8, 0.2), Vec2(0.15, 0.9)})
    CHECK(std::abs(divfree.grad_u(p).trace()) <= 1e-13);

  CHECK_THROWS_AS((void)manufactured("bogus", mat), std::invalid_argument);
}

TEST_CASE("manufactured loads match the finite-difference oracle") {
  std::mt19937_64 rng(19);
  auto u01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  for (const char* id : {"sine", "poly3", "divfree"}) {
    for (const double nu : {0.35, 0.49}) {
      const Material mat = make_material(1.0, nu);
      const ManufacturedSolution s = manufactured(id, mat);
      for (int trial = 0; trial < 5; ++trial) {
        const Vec2 p(0.15 + 0.7 * u01(), 0.15 + 0.7 * u01());
        INFO(id, " nu=", nu);
        CHECK(fd_load_mismatch(s, mat, p) <= 1e-5);
      }
    }
  }
}

TEST_CASE("gradients match finite differences") {
  std::mt19937_64 rng(29);
  auto u01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  const Material mat = make_material(1.0, 0.4);
  for (const char* id : {"sine", "poly3", "divfree"}) {
    const ManufacturedSolution s = manufactured(id, mat);
    const double step = 1e-6;
    for (int trial = 0; trial < 5; ++trial) {
      const Vec2 p(0.1 + 0.8 * u01(), 0.1 + 0.8 * u01());
      const Eigen::Matrix2d g = s.grad_u(p);
      const Vec2 gx = (s.u(p + Vec2(step, 0)) - s.u(p - Vec2(step, 0))) / (2 * step);
      const Vec2 gy = (s.u(p + Vec2(0, step)) - s.u(p - Vec2(0, step))) / (2 * step);
      CHECK(std::abs(g(0, 0) - gx.x()) <= 1e-8);
      CHECK(std::abs(g(1, 0) - gx.y()) <= 1e-8);
      CHECK(std::abs(g(0, 1) - gy.x()) <= 1e-8);
      CHECK(std::abs(g(1, 1) - gy.y()) <= 1e-8);
    }
  }
}

TEST_CASE("error norms") {
  const Material mat = make_material(1.0, 0.3);
  const Mesh mesh = generate_mesh(Domain::unit_square, MeshKind::voronoi, 5, 2);
  const GlobalDofMap map = build_dof_map(mesh, 1);

  SUBCASE("interpolant of a degree-1 solution has machine-level error") {
    ManufacturedSolution lin;
    lin.u = [](const Vec2& p) {
      return Vec2(0.3 - p.x() + 2.0 * p.y(), 1.1 + 0.5 * p.x());
    };
    lin.grad_u = [](const Vec2&) {
      Eigen::Matrix2d g;
      g << -1.0, 2.0, 0.5, 0.0;
      return g;
    };
    lin.f = [](const Vec2&) { return Vec2::Zero(); };
    const Eigen::VectorXd dofs = interpolate_global(mesh, map, 1, lin.u);
    const auto [l2, h1] = error_norms(mesh, map, 1, mat, lin, dofs);
    CHECK(l2 <= 1e-10);
    CHECK(h1 <= 1e-10);
  }

  SUBCASE("interpolant of a degree-2 solution has machine-level error at k=2") {
    ManufacturedSolution quad;
    quad.u = [](const Vec2& p) {
      return Vec2(p.x() * p.x() - 0.5 * p.y() * p.y() + p.x() * p.y(),
                  0.3 * p.y() * p.y() + p.x());
    };
    quad.grad_u = [](const Vec2& p) {
      Eigen::Matrix2d g;
      g << 2.0 * p.x() + p.y(), -p.y() + p.x(), 1.0, 0.6 * p.y();
      return g;
    };
    quad.f = [](const Vec2&) { return Vec2::Zero(); };
    const GlobalDofMap map2 = build_dof_map(mesh, 2);
    const Eigen::VectorXd dofs = interpolate_global(mesh, map2, 2, quad.u);
    const auto [l2, h1] = error_norms(mesh, map2, 2, mat, quad, dofs);
    CHECK(l2 <= 1e-10);
    CHECK(h1 <= 1e-10);
  }

  SUBCASE("zero dofs give the norm of the exact solution") {
    const ManufacturedSolution sine = manufactured("sine", mat);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(map.n_dofs);
    const auto [l2, h1] = error_norms(mesh, map, 1, mat, sine, zero);
    // ||u||: two components of sin sin, each integrating to 1/4
    CHECK(l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    CHECK(h1 == doctest::Approx(M_PI).epsilon(1e-4));  // |u|_1^2 = 2 * pi^2 / 2
    const auto [nl2, nh1] = exact_norms(mesh, 1, sine);
    CHECK(nl2 == doctest::Approx(l2).epsilon(1e-12));
    CHECK(nh1 == doctest::Approx(h1).epsilon(1e-12));
  }
}

TEST_CASE("rate arithmetic") {
  std::vector<StudyRow> rows(2);
  rows[0].h = 1.0;
  rows[0].err_l2 = 1.0;
  rows[0].err_h1 = 1.0;
  rows[1].h = 0.5;
  rows[1].err_l2 = 0.25;
  rows[1].err_h1 = 0.5;
  compute_rates(rows);
  CHECK(std::isnan(rows[0].rate_l2));
  CHECK(rows[1].rate_l2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rows[1].rate_h1 == doctest::Approx(1.0).epsilon(1e-14));

  rows[1].err_l2 = 0.0;  // undefined rate stays blank
  compute_rates(rows);
  CHECK(std::isnan(rows[1].rate_l2));
}

TEST_CASE("run_study: csv artifact, determinism, decreasing errors") {
  StudyConfig cfg;
  cfg.domain = Domain::unit_square;
  cfg.kind = MeshKind::squares;
  cfg.degree = 1;
  cfg.levels = {4, 8, 16};
  cfg.poisson = 0.35;
  cfg.solution = "sine";
  cfg.out_csv = "study_test_a.csv";
  const std::vector<StudyRow> rows = run_study(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].err_l2 < rows[0].err_l2);
  CHECK(rows[2].err_l2 < rows[1].err_l2);
  CHECK(rows[2].err_h1 < rows[1].err_h1);
  CHECK(rows[0].ndof == 2 * 25);

  cfg.out_csv = "study_test_b.csv";
  (void)run_study(cfg);
  const std::string a = slurp("study_test_a.csv");
  const std::string b = slurp("study_test_b.csv");
  CHECK(a == b);
  CHECK(a.rfind("level,h,ndof,err_l2,err_h1,rate_l2,rate_h1\n", 0) == 0);
  CHECK(a.find("\r") == std::string::npos);
  // first data row carries blank rate fields
  const std::size_t line1 = a.find('\n') + 1;
  const std::string first = a.substr(line1, a.find('\n', line1) - line1);
  CHECK(first.substr(first.size() - 2) == ",,");
  std::filesystem::remove("study_test_a.csv");
  std::filesystem::remove("study_test_b.csv");
}

TEST_CASE("run_study validates its configuration") {
  StudyConfig cfg;
  cfg.levels = {8, 4};
  CHECK_THROWS_AS((void)run_study(cfg), std::invalid_argument);
  cfg.levels = {};
  CHECK_THROWS_AS((void)run_study(cfg), std::invalid_argument);
  cfg.levels = {4, 8};
  cfg.domain = Domain::lshape;
  cfg.solution = "poly3";
  CHECK_THROWS_AS((void)run_study(cfg), std::invalid_argument);
}

TEST_CASE("interpolant errors bound the study from below at the optimal rate") {
  const Material mat = make_material(1.0, 0.35);
  const ManufacturedSolution sine = manufactured("sine", mat);
  for (int k : {1, 2}) {
    double prev_l2 = -1, prev_h1 = -1, prev_h = -1;
    for (const int level : {8, 16, 32}) {
      const Mesh mesh = generate_mesh(Domain::unit_square, MeshKind::triangles, level, 0);
      const GlobalDofMap map = build_dof_map(mesh, k);
      const Eigen::VectorXd dofs = interpolate_global(mesh, map, k, sine.u);
      const auto [l2, h1] = error_norms(mesh, map, k, mat, sine, dofs);
      const double h = mesh_metrics(mesh).h;
      if (prev_l2 > 0) {
        const double rl2 = std::log(prev_l2 / l2) / std::log(prev_h / h);
        const double rh1 = std::log(prev_h1 / h1) / std::log(prev_h / h);
        CHECK(rl2 >= k + 1 - 0.25);
        CHECK(rh1 >= k - 0.25);
      }
      prev_l2 = l2;
      prev_h1 = h1;
      prev_h = h;
    }
  }
}

TEST_CASE("poly3 at k=2 converges at third order in L2") {
  StudyConfig cfg;
  cfg.kind = MeshKind::squares;
  cfg.degree = 2;
  cfg.levels = {4, 8, 16};
  cfg.solution = "poly3";
  const std::vector<StudyRow> rows = run_study(cfg);
  CHECK(rows.back().rate_l2 >= 2.7);
  CHECK(rows.back().rate_h1 >= 1.8);
}

TEST_CASE("near-incompressible errors grow for the divergence-free probe") {
  StudyConfig cfg;
  cfg.kind = MeshKind::squares;
  cfg.degree = 1;
  cfg.levels = {16};
  cfg.solution = "divfree";
  cfg.poisson = 0.35;
  const double e35 = run_study(cfg)[0].err_h1;
  cfg.poisson = 0.49;
  const double e49 = run_study(cfg)[0].err_h1;
  CHECK(e49 >= e35);
}
