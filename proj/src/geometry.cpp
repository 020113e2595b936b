#include "vem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vem {

Polygon Mesh::cell_polygon(int c) const {
  const Cell& cell = cells.at(static_cast<std::size_t>(c));
  Polygon p;
  p.reserve(cell.v.size());
  for (int i : cell.v) p.push_back(vertices.at(static_cast<std::size_t>(i)));
  return p;
}

std::vector<EdgeInfo> collect_edges(const Mesh& mesh) {
  std::map<std::pair<int, int>, EdgeInfo> edges;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Cell& cell = mesh.cells[static_cast<std::size_t>(c)];
    const int m = cell.size();
    for (int s = 0; s < m; ++s) {
      const int u = cell.v[static_cast<std::size_t>(s)];
      const int w = cell.v[static_cast<std::size_t>((s + 1) % m)];
      const std::pair<int, int> key{std::min(u, w), std::max(u, w)};
      auto [it, inserted] = edges.try_emplace(key);
      EdgeInfo& e = it->second;
      if (inserted) {
        e.a = key.first;
        e.b = key.second;
        e.cell0 = c;
        e.side0 = s;
      } else if (e.cell1 < 0) {
        e.cell1 = c;
        e.side1 = s;
      } else {
        throw numerical_error("edge (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) +
                              ") used by more than two cells");
      }
    }
  }
  std::vector<EdgeInfo> out;
  out.reserve(edges.size());
  for (auto& [key, e] : edges) out.push_back(e);
  return out;
}

void refresh_boundary_flags(Mesh& mesh) {
  mesh.boundary_vertex.assign(static_cast<std::size_t>(mesh.n_vertices()), 0);
  for (const EdgeInfo& e : collect_edges(mesh)) {
    if (e.boundary()) {
      mesh.boundary_vertex[static_cast<std::size_t>(e.a)] = 1;
      mesh.boundary_vertex[static_cast<std::size_t>(e.b)] = 1;
    }
  }
}

double polygon_area(const Polygon& p) {
  const std::size_t n = p.size();
  double twice = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& p) {
  const std::size_t n = p.size();
  double twice = 0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    const double cross = a.x() * b.y() - b.x() * a.y();
    twice += cross;
    acc += cross * (a + b);
  }
  if (twice == 0) throw numerical_error("polygon_centroid: zero-area polygon");
  return acc / (3.0 * twice);
}

double polygon_diameter(const Polygon& p) {
  double d2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      d2 = std::max(d2, (p[i] - p[j]).squaredNorm());
  return std::sqrt(d2);
}

double polygon_perimeter(const Polygon& p) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += (p[(i + 1) % p.size()] - p[i]).norm();
  return s;
}

MeshMetrics mesh_metrics(const Mesh& mesh) {
  MeshMetrics m;
  m.per_cell.reserve(static_cast<std::size_t>(mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Polygon p = mesh.cell_polygon(c);
    CellMetrics cm;
    cm.h = polygon_diameter(p);
    cm.area = polygon_area(p);
    cm.perimeter = polygon_perimeter(p);
    cm.min_edge = std::numeric_limits<double>::infinity();
    const Vec2 cen = polygon_centroid(p);
    cm.rho_hat = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Vec2& a = p[i];
      const Vec2& b = p[(i + 1) % p.size()];
      const double len = (b - a).norm();
      cm.min_edge = std::min(cm.min_edge, len);
      if (len > 0) {
        const double dist = std::abs((b - a).x() * (cen - a).y() -
                                     (b - a).y() * (cen - a).x()) / len;
        cm.rho_hat = std::min(cm.rho_hat, dist);
      }
    }
    m.h = std::max(m.h, cm.h);
    m.per_cell.push_back(cm);
  }
  return m;
}

namespace {

// Proper or improper intersection of open segments (a,b) and (c,d),
// excluding shared endpoints.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
         o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

bool point_in_loop(const Vec2& p, const std::vector<Vec2>& loop) {
  bool inside = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

}  // namespace

std::vector<std::string> validate_mesh(const Mesh& mesh) {
  std::vector<std::string> bad;
  const int nv = mesh.n_vertices();

  if (static_cast<int>(mesh.boundary_vertex.size()) != nv)
    bad.push_back("boundary_vertex flags missing or sized " +
                  std::to_string(mesh.boundary_vertex.size()) + " for " +
                  std::to_string(nv) + " vertices");

  for (int i = 0; i < nv; ++i)
    if (!mesh.vertices[static_cast<std::size_t>(i)].allFinite())
      bad.push_back("vertex " + std::to_string(i) + ": non-finite coordinates");

  bool indices_ok = true;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Cell& cell = mesh.cells[static_cast<std::size_t>(c)];
    if (cell.size() < 3) {
      bad.push_back("cell " + std::to_string(c) + ": fewer than 3 vertices");
      indices_ok = false;
      continue;
    }
    bool in_range = true;
    for (int i : cell.v)
      if (i < 0 || i >= nv) {
        bad.push_back("cell " + std::to_string(c) + ": vertex index " +
                      std::to_string(i) + " out of range");
        in_range = false;
      }
    if (!in_range) {
      indices_ok = false;
      continue;
    }

    const Polygon p = mesh.cell_polygon(c);
    const double area = polygon_area(p);
    if (!(area > 0))
      bad.push_back("cell " + std::to_string(c) +
                    ": non-positive signed area (clockwise or degenerate)");
    const double h = polygon_diameter(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double len = (p[(i + 1) % p.size()] - p[i]).norm();
      if (len < 1e-14 * h)
        bad.push_back("cell " + std::to_string(c) + ": consecutive vertices " +
                      std::to_string(cell.v[i]) + "," +
                      std::to_string(cell.v[(i + 1) % p.size()]) +
                      " coincide within 1e-14*h_E");
    }
    const std::size_t m = p.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        if (j == i + 1 || (i == 0 && j == m - 1)) continue;  // adjacent
        if (segments_cross(p[i], p[(i + 1) % m], p[j], p[(j + 1) % m]))
          bad.push_back("cell " + std::to_string(c) + ": edges " +
                        std::to_string(i) + " and " + std::to_string(j) +
                        " intersect (not a simple polygon)");
      }
  }
  if (!indices_ok) return bad;

  // Edge sharing: every undirected edge carried by 1 or 2 cells, and with
  // opposite orientation when shared.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> uses;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Cell& cell = mesh.cells[static_cast<std::size_t>(c)];
    const int m = cell.size();
    for (int s = 0; s < m; ++s) {
      const int u = cell.v[static_cast<std::size_t>(s)];
      const int w = cell.v[static_cast<std::size_t>((s + 1) % m)];
      uses[{std::min(u, w), std::max(u, w)}].emplace_back(c, u < w ? +1 : -1);
    }
  }
  bool topology_ok = true;
  std::map<int, std::vector<int>> boundary_next;  // directed boundary edges
  for (const auto& [key, list] : uses) {
    if (list.size() > 2) {
      bad.push_back("edge (" + std::to_string(key.first) + "," +
                    std::to_string(key.second) + ") used by " +
                    std::to_string(list.size()) + " cells");
      topology_ok = false;
    } else if (list.size() == 2 && list[0].second == list[1].second) {
      bad.push_back("edge (" + std::to_string(key.first) + "," +
                    std::to_string(key.second) +
                    ") traversed in the same direction by cells " +
                    std::to_string(list[0].first) + " and " +
                    std::to_string(list[1].first));
      topology_ok = false;
    } else if (list.size() == 1) {
      // orient the boundary edge the way its cell traverses it
      const int u = list[0].second > 0 ? key.first : key.second;
      const int w = list[0].second > 0 ? key.second : key.first;
      boundary_next[u].push_back(w);
      if (static_cast<int>(mesh.boundary_vertex.size()) == nv &&
          (!mesh.boundary_vertex[static_cast<std::size_t>(key.first)] ||
           !mesh.boundary_vertex[static_cast<std::size_t>(key.second)]))
        bad.push_back("edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) +
                      ") is boundary but a vertex is not flagged");
    }
  }

  if (topology_ok) {
    // Trace the directed boundary into loops. Consistent tilings have every
    // cell area accounted for by the loops' signed areas, and no positive
    // loop nested inside another one (that means a patch of cells lies on
    // top of the rest of the mesh).
    std::vector<std::vector<Vec2>> loops;
    std::vector<double> loop_area;
    bool loops_ok = true;
    std::map<int, std::vector<int>> next = boundary_next;
    while (!next.empty() && loops_ok) {
      const int start = next.begin()->first;
      std::vector<Vec2> loop;
      int at = start;
      for (std::size_t guard = 0; guard <= 2 * uses.size(); ++guard) {
        loop.push_back(mesh.vertices[static_cast<std::size_t>(at)]);
        const auto it = next.find(at);
        if (it == next.end() || it->second.empty()) {
          loops_ok = false;
          break;
        }
        const int to = it->second.back();
        it->second.pop_back();
        if (it->second.empty()) next.erase(it);
        at = to;
        if (at == start) break;
      }
      if (at != start) loops_ok = false;
      if (!loops_ok) {
        bad.push_back("boundary edges do not close into loops");
        break;
      }
      loops.push_back(loop);
      loop_area.push_back(polygon_area(loop));
    }

    if (loops_ok) {
      double cells_area = 0;
      for (int c = 0; c < mesh.n_cells(); ++c)
        cells_area += polygon_area(mesh.cell_polygon(c));
      double enclosed = 0;
      for (const double a : loop_area) enclosed += a;
      if (enclosed > 0 && std::abs(cells_area - enclosed) > 1e-10 * enclosed)
        bad.push_back("cell areas sum to " + std::to_string(cells_area) +
                      " but the boundary encloses " + std::to_string(enclosed) +
                      " (cells overlap or leave gaps)");
      for (std::size_t i = 0; i < loops.size(); ++i)
        for (std::size_t j = 0; j < loops.size(); ++j) {
          if (i == j || !(loop_area[i] > 0) || !(loop_area[j] > 0)) continue;
          if (point_in_loop(loops[j].front(), loops[i]))
            bad.push_back("cells overlap: outer boundary loop " +
                          std::to_string(j) + " lies inside loop " +
                          std::to_string(i));
        }
    }
  }
  return bad;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("save_mesh: cannot open " + path);
  out << "polymesh2d 1\n";
  out << mesh.n_vertices() << " " << mesh.n_cells() << "\n";
  char buf[128];
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2& v = mesh.vertices[static_cast<std::size_t>(i)];
    const int b = mesh.boundary_vertex.empty()
                      ? 0
                      : mesh.boundary_vertex[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", v.x(), v.y(), b);
    out << buf;
  }
  for (const Cell& c : mesh.cells) {
    out << c.size();
    for (int i : c.v) out << " " << i;
    out << "\n";
  }
  if (!out) throw std::invalid_argument("save_mesh: write failed on " + path);
}

namespace {

// Next non-comment, non-blank line; keeps a running line number for messages.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (!blank) return true;
  }
  return false;
}

[[noreturn]] void parse_fail(int lineno, const std::string& what) {
  throw std::invalid_argument("load_mesh: line " + std::to_string(lineno) +
                              ": " + what);
}

}  // namespace

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_mesh: cannot open " + path);
  std::string line;
  int lineno = 0;

  if (!next_line(in, line, lineno)) parse_fail(lineno, "missing header");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "polymesh2d" || version != 1)
      parse_fail(lineno, "expected header 'polymesh2d 1'");
  }

  int nv = 0, nc = 0;
  if (!next_line(in, line, lineno)) parse_fail(lineno, "missing size line");
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nc) || nv < 0 || nc < 0)
      parse_fail(lineno, "expected '<nv> <nc>'");
  }

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  mesh.boundary_vertex.reserve(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno))
      parse_fail(lineno, "unexpected end of file in vertex block");
    std::istringstream ss(line);
    double x = 0, y = 0;
    int b = 0;
    if (!(ss >> x >> y >> b) || (b != 0 && b != 1))
      parse_fail(lineno, "expected 'x y b' with b in {0,1}");
    mesh.vertices.emplace_back(x, y);
    mesh.boundary_vertex.push_back(static_cast<std::uint8_t>(b));
  }
  for (int c = 0; c < nc; ++c) {
    if (!next_line(in, line, lineno))
      parse_fail(lineno, "unexpected end of file in cell block");
    std::istringstream ss(line);
    int m = 0;
    if (!(ss >> m) || m < 3) parse_fail(lineno, "cell must list >= 3 vertices");
    Cell cell;
    cell.v.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      int idx = 0;
      if (!(ss >> idx)) parse_fail(lineno, "cell lists fewer indices than declared");
      if (idx < 0 || idx >= nv)
        parse_fail(lineno, "vertex index " + std::to_string(idx) +
                               " out of range [0," + std::to_string(nv) + ")");
      cell.v.push_back(idx);
    }
    mesh.cells.push_back(std::move(cell));
  }
  return mesh;
}

}  // namespace vem
