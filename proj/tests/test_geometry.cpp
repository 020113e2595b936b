#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vem/generators.hpp"

using namespace vem;

namespace {

double total_area(const Mesh& m) {
  double a = 0;
  for (int c = 0; c < m.n_cells(); ++c) a += polygon_area(m.cell_polygon(c));
  return a;
}

bool meshes_identical(const Mesh& a, const Mesh& b) {
  if (a.n_vertices() != b.n_vertices() || a.n_cells() != b.n_cells()) return false;
  for (int i = 0; i < a.n_vertices(); ++i)
    if (a.vertices[i].x() != b.vertices[i].x() ||
        a.vertices[i].y() != b.vertices[i].y())
      return false;
  for (int c = 0; c < a.n_cells(); ++c)
    if (a.cells[c].v != b.cells[c].v) return false;
  return true;
}

}  // namespace

TEST_CASE("structured squares level 2") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::squares, 2, 0);
  CHECK(m.n_cells() == 4);
  CHECK(m.n_vertices() == 9);
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("two triangles tile the unit square") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::triangles, 1, 0);
  CHECK(m.n_cells() == 2);
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("voronoi mesh: area partition and convex cells") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::voronoi, 4, 7);
  CHECK(std::abs(total_area(m) - 1.0) <= 1e-10);
  CHECK(validate_mesh(m).empty());
  for (int c = 0; c < m.n_cells(); ++c) {
    const Polygon p = m.cell_polygon(c);
    const double h2 = polygon_diameter(p) * polygon_diameter(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Vec2& a = p[i];
      const Vec2& b = p[(i + 1) % p.size()];
      const Vec2& d = p[(i + 2) % p.size()];
      const double cross = (b - a).x() * (d - b).y() - (b - a).y() * (d - b).x();
      CHECK(cross >= -1e-12 * h2);
    }
  }
}

TEST_CASE("every generated family tiles its domain") {
  for (const Domain dom : {Domain::unit_square, Domain::lshape}) {
    const double expect = dom == Domain::unit_square ? 1.0 : 3.0;
    for (const MeshKind kind :
         {MeshKind::triangles, MeshKind::deformed_triangles_midpoints,
          MeshKind::deformed_squares, MeshKind::squares, MeshKind::voronoi,
          MeshKind::glued_voronoi}) {
      if (dom == Domain::lshape && kind == MeshKind::glued_voronoi) continue;
      const Mesh m = generate_mesh(dom, kind, 6, 3);
      INFO(to_string(dom), "/", to_string(kind));
      CHECK(std::abs(total_area(m) - expect) <= 1e-10 * expect);
      CHECK(validate_mesh(m).empty());
    }
  }
}

TEST_CASE("glued voronoi keeps near-duplicate interface nodes") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::glued_voronoi, 8, 1);
  CHECK(validate_mesh(m).empty());
  double min_edge = 1e300;
  for (const CellMetrics& cm : mesh_metrics(m).per_cell)
    min_edge = std::min(min_edge, cm.min_edge);
  // interface gaps between independently meshed strips are far smaller than
  // any interior Voronoi edge at this level
  CHECK(min_edge < 2e-2);
  CHECK(min_edge > 0);
}

TEST_CASE("split_edges_small midpoint split of a triangle") {
  Mesh tri;
  tri.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  tri.cells.push_back({{0, 1, 2}});
  refresh_boundary_flags(tri);
  const Mesh hex = split_edges_small(tri, 0.5);
  CHECK(hex.cells[0].size() == 6);
  CHECK(polygon_area(hex.cell_polygon(0)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("split_edges_small at 1/50") {
  Mesh tri;
  tri.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  tri.cells.push_back({{0, 1, 2}});
  refresh_boundary_flags(tri);
  const Mesh hex = split_edges_small(tri, 0.02);
  const CellMetrics cm = mesh_metrics(hex).per_cell[0];
  // legs contribute 0.02-long pieces, the hypotenuse a sqrt(2)/50 piece
  CHECK(cm.min_edge == doctest::Approx(0.02).epsilon(1e-13));
  double hyp_short = 1e300;
  const Polygon p = hex.cell_polygon(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    if (std::abs((a.x() + a.y()) - 1.0) < 1e-12 && std::abs((b.x() + b.y()) - 1.0) < 1e-12)
      hyp_short = std::min(hyp_short, (b - a).norm());
  }
  CHECK(hyp_short == doctest::Approx(std::sqrt(2.0) / 50.0).epsilon(1e-12));
}

TEST_CASE("split preserves area and doubles triangle edge count") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::triangles, 8, 0);
  const Mesh s = split_edges_small(m, 0.02);
  CHECK(std::abs(total_area(s) - total_area(m)) <= 1e-13);
  for (int c = 0; c < s.n_cells(); ++c) CHECK(s.cells[c].size() == 6);
  CHECK(validate_mesh(s).empty());
  // shared edges got the same split point: conformity survives
  const MeshMetrics mm = mesh_metrics(s);
  double min_edge = 1e300;
  for (const CellMetrics& cm : mm.per_cell) min_edge = std::min(min_edge, cm.min_edge);
  CHECK(min_edge == doctest::Approx(0.02 / 8.0).epsilon(1e-12));
}

TEST_CASE("split rejects out-of-range fractions") {
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::squares, 2, 0);
  CHECK_THROWS_AS((void)split_edges_small(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)split_edges_small(m, 0.51), std::invalid_argument);
}

TEST_CASE("mesh metrics on canonical cells") {
  Mesh m;
  m.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1), Vec2(2, 0), Vec2(2, 1)};
  m.cells.push_back({{0, 1, 2, 3}});
  m.cells.push_back({{1, 4, 5}});
  refresh_boundary_flags(m);
  const MeshMetrics mm = mesh_metrics(m);
  const CellMetrics& sq = mm.per_cell[0];
  CHECK(sq.h == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.area == doctest::Approx(1.0));
  CHECK(sq.perimeter == doctest::Approx(4.0));
  CHECK(sq.rho_hat == doctest::Approx(0.5));
  const CellMetrics& tr = mm.per_cell[1];
  CHECK(tr.h == doctest::Approx(std::sqrt(2.0)));
  CHECK(tr.area == doctest::Approx(0.5));
  CHECK(mm.h == doctest::Approx(std::max(sq.h, tr.h)));
  for (const CellMetrics& cm : mm.per_cell) {
    CHECK(cm.area <= cm.h * cm.h);
    CHECK(cm.perimeter >= cm.h);
    CHECK(cm.min_edge > 0);
  }
}

TEST_CASE("h is non-increasing under refinement") {
  for (const MeshKind kind : {MeshKind::squares, MeshKind::triangles}) {
    const double h1 = mesh_metrics(generate_mesh(Domain::unit_square, kind, 4, 0)).h;
    const double h2 = mesh_metrics(generate_mesh(Domain::unit_square, kind, 8, 0)).h;
    CHECK(h2 <= h1);
  }
}

TEST_CASE("validate flags orientation and overlap") {
  Mesh m = generate_mesh(Domain::unit_square, MeshKind::squares, 2, 0);
  CHECK(validate_mesh(m).empty());

  Mesh cw = m;
  std::reverse(cw.cells[0].v.begin(), cw.cells[0].v.end());
  const auto bad1 = validate_mesh(cw);
  bool orientation = false;
  for (const std::string& s : bad1)
    if (s.find("cell 0") != std::string::npos && s.find("area") != std::string::npos)
      orientation = true;
  CHECK(orientation);

  // a second copy of cell 0 on duplicated vertices: edge topology stays
  // consistent, so the overlap shows up as an area-sum violation
  Mesh overlap = m;
  const int base = overlap.n_vertices();
  for (int i : m.cells[0].v) {
    overlap.vertices.push_back(m.vertices[i]);
    overlap.boundary_vertex.push_back(0);
  }
  Cell dup;
  for (int i = 0; i < m.cells[0].size(); ++i) dup.v.push_back(base + i);
  overlap.cells.push_back(dup);
  const auto bad2 = validate_mesh(overlap);
  bool area_violation = false;
  for (const std::string& s : bad2)
    if (s.find("overlap") != std::string::npos) area_violation = true;
  CHECK(area_violation);
}

TEST_CASE("mesh file round trip") {
  const std::string path = "roundtrip_mesh_test.txt";
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::triangles, 1, 0);
  save_mesh(m, path);
  const Mesh r = load_mesh(path);
  CHECK(meshes_identical(m, r));
  std::filesystem::remove(path);
}

TEST_CASE("round trip is bitwise for a voronoi mesh") {
  const std::string path = "roundtrip_voronoi_test.txt";
  const Mesh m = generate_mesh(Domain::unit_square, MeshKind::voronoi, 8, 5);
  save_mesh(m, path);
  const Mesh r = load_mesh(path);
  CHECK(meshes_identical(m, r));
  CHECK(r.boundary_vertex == m.boundary_vertex);
  std::filesystem::remove(path);
}

TEST_CASE("loader reports malformed input with line numbers") {
  const std::string path = "bad_mesh_test.txt";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("polymesh2d 1\n3 1\n0 0 1\n1 0 1\n0 1 1\n3 0 1 9\n", f);
    std::fclose(f);
  }
  try {
    (void)load_mesh(path);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("line 6") != std::string::npos);
    CHECK(what.find("out of range") != std::string::npos);
  }
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("polymesh 7\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS((void)load_mesh(path), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("generation is deterministic in the seed") {
  for (const MeshKind kind : {MeshKind::voronoi, MeshKind::glued_voronoi,
                              MeshKind::deformed_triangles_midpoints}) {
    const Mesh a = generate_mesh(Domain::unit_square, kind, 6, 42);
    const Mesh b = generate_mesh(Domain::unit_square, kind, 6, 42);
    const Mesh c = generate_mesh(Domain::unit_square, kind, 6, 43);
    CHECK(meshes_identical(a, b));
    CHECK(!meshes_identical(a, c));
  }
}

TEST_CASE("invalid generation requests are rejected") {
  CHECK_THROWS_AS((void)generate_mesh(Domain::unit_square, MeshKind::squares, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)generate_mesh(Domain::lshape, MeshKind::glued_voronoi, 8, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)generate_mesh(Domain::lshape, MeshKind::squares, 7, 0),
                  std::invalid_argument);
}
