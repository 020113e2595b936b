#include "vem/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>

namespace vem {

namespace {

// Uniform doubles straight from the generator's bits so meshes do not depend
// on the standard library's distribution implementation.
double uniform01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_generated(const Mesh& mesh, const std::string& what) {
  const std::vector<std::string> bad = validate_mesh(mesh);
  if (!bad.empty())
    throw numerical_error("generate_mesh(" + what + "): invalid mesh: " + bad.front());
}

// ---------------------------------------------------------------------------
// Structured families

struct Grid {
  int n = 0;             // cells per axis
  double x0 = 0, y0 = 0; // origin
  double len = 1;        // side length of the square being gridded
  bool lshape = false;   // drop cells in the upper-right quadrant

  double coord(int i) const { return x0 + len * static_cast<double>(i) / n; }
  bool cell_kept(int i, int j) const {
    return !lshape || 2 * i < n || 2 * j < n;
  }
};

Mesh structured_squares(const Grid& g) {
  Mesh mesh;
  std::vector<int> vid(static_cast<std::size_t>((g.n + 1) * (g.n + 1)), -1);
  auto vertex = [&](int i, int j) {
    int& id = vid[static_cast<std::size_t>(j * (g.n + 1) + i)];
    if (id < 0) {
      id = mesh.n_vertices();
      mesh.vertices.emplace_back(g.coord(i), g.coord(j));
    }
    return id;
  };
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      if (!g.cell_kept(i, j)) continue;
      Cell c;
      c.v = {vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)};
      mesh.cells.push_back(std::move(c));
    }
  refresh_boundary_flags(mesh);
  return mesh;
}

Mesh structured_triangles(const Grid& g) {
  Mesh squares = structured_squares(g);
  Mesh mesh;
  mesh.vertices = squares.vertices;
  for (const Cell& q : squares.cells) {
    mesh.cells.push_back({{q.v[0], q.v[1], q.v[2]}});
    mesh.cells.push_back({{q.v[0], q.v[2], q.v[3]}});
  }
  refresh_boundary_flags(mesh);
  return mesh;
}

// Displace interior vertices by a seeded random vector of magnitude at most
// `magnitude`; boundary vertices stay put. The random stream is consumed for
// every vertex so the draw does not depend on boundary flags.
void deform_interior(Mesh& mesh, double magnitude, std::mt19937_64& rng) {
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const double r = magnitude * uniform01(rng);
    const double t = 2.0 * std::numbers::pi * uniform01(rng);
    if (!mesh.boundary_vertex[static_cast<std::size_t>(i)])
      mesh.vertices[static_cast<std::size_t>(i)] += r * Vec2(std::cos(t), std::sin(t));
  }
}

// ---------------------------------------------------------------------------
// Voronoi machinery

// Keep the half-plane (x - point) . normal <= 0.
Polygon clip_halfplane(const Polygon& poly, const Vec2& point, const Vec2& normal) {
  Polygon out;
  const std::size_t n = poly.size();
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double da = (a - point).dot(normal);
    const double db = (b - point).dot(normal);
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0))
      out.push_back(a + (da / (da - db)) * (b - a));
  }
  return out;
}

// Remove the open quadrant {x > corner.x, y > corner.y} from a convex CCW
// cell. The excluded arc of the cell boundary is replaced by the path along
// the quadrant's two boundary rays, passing the corner when it lies inside.
Polygon convex_minus_quadrant(const Polygon& poly, const Vec2& corner) {
  const std::size_t n = poly.size();
  auto inside = [&](const Vec2& p) {
    return p.x() > corner.x() && p.y() > corner.y();
  };
  bool any = false;
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside(poly[i]))
      any = true;
    else if (start == n)
      start = i;
  }
  if (start == n)
    throw numerical_error("convex_minus_quadrant: cell lies inside the notch");
  // Entry/exit bookkeeping: -1 none, 0 vertical ray x=corner.x, 1 horizontal.
  // The walk starts at a vertex outside the quadrant so every excursion into
  // it opens and closes within the loop.
  Polygon out;
  out.reserve(n + 3);
  int entry_ray = -1;
  auto close_excursion = [&](const Vec2& exit_point, int exit_ray) {
    if (entry_ray >= 0 && entry_ray != exit_ray) out.push_back(corner);
    out.push_back(exit_point);
    entry_ray = -1;
  };
  bool seen_crossing = false;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = (start + step) % n;
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (!inside(a)) out.push_back(a);
    // Parameter interval of the open quadrant along segment a->b.
    double t0 = 0, t1 = 1;
    int ray0 = -1, ray1 = -1;
    for (int axis = 0; axis < 2; ++axis) {
      const double da = a[axis] - corner[axis];
      const double db = b[axis] - corner[axis];
      if (da <= 0 && db <= 0) { t0 = 1; t1 = 0; break; }   // never inside on this axis
      if (da < 0 || db < 0) {
        const double tc = da / (da - db);
        if (db > da) {        // entering the axis half-plane at tc
          if (tc > t0) { t0 = tc; ray0 = axis; }
        } else {              // leaving it at tc
          if (tc < t1) { t1 = tc; ray1 = axis; }
        }
      }
    }
    if (t0 >= t1) continue;  // edge misses the quadrant
    seen_crossing = true;
    if (t0 > 0 || !inside(a)) {
      Vec2 p = a + t0 * (b - a);
      if (ray0 >= 0) p[ray0] = corner[ray0];
      out.push_back(p);
      entry_ray = ray0;
    }
    if (t1 < 1) {
      Vec2 p = a + t1 * (b - a);
      if (ray1 >= 0) p[ray1] = corner[ray1];
      close_excursion(p, ray1);
    }
  }
  if (!any && !seen_crossing) return poly;
  if (entry_ray >= 0)
    throw numerical_error("convex_minus_quadrant: cell straddles the notch");
  return out;
}

struct ClipDomain {
  Vec2 lo, hi;
  bool notch = false;   // exclude the open quadrant beyond `corner`
  Vec2 corner;

  Polygon bounding_box() const {
    return {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()),
            Vec2(hi.x(), hi.y()), Vec2(lo.x(), hi.y())};
  }
  bool contains(const Vec2& p) const {
    if (p.x() < lo.x() || p.x() > hi.x() || p.y() < lo.y() || p.y() > hi.y())
      return false;
    return !(notch && p.x() > corner.x() && p.y() > corner.y());
  }
};

class VoronoiBuilder {
 public:
  VoronoiBuilder(std::vector<Vec2> seeds, ClipDomain domain, double spacing)
      : seeds_(std::move(seeds)), domain_(domain), spacing_(spacing) {
    rebuild_buckets();
  }

  Polygon cell(std::size_t i) const {
    const Vec2 si = seeds_[i];
    const double diag = (domain_.hi - domain_.lo).norm();
    const int reach_all = static_cast<int>(std::ceil(diag / spacing_)) + 2;
    Polygon poly;
    for (int reach = 4;; reach *= 2) {
      reach = std::min(reach, reach_all);
      poly = domain_.bounding_box();
      bool proven = false;
      for (const auto& [d2, j] : neighbors_within(i, reach)) {
        double rmax2 = 0;
        for (const Vec2& p : poly) rmax2 = std::max(rmax2, (p - si).squaredNorm());
        if (d2 >= 4.0 * rmax2) { proven = true; break; }
        const Vec2 sj = seeds_[j];
        poly = clip_halfplane(poly, 0.5 * (si + sj), sj - si);
        if (poly.empty()) break;
      }
      if (!proven && !poly.empty() && reach < reach_all) {
        // Seeds beyond the searched buckets are at least reach*spacing away;
        // grow the search until no unseen seed can cut the cell.
        double rmax2 = 0;
        for (const Vec2& p : poly) rmax2 = std::max(rmax2, (p - si).squaredNorm());
        const double unseen = reach * spacing_;
        if (unseen * unseen < 4.0 * rmax2) continue;
      }
      break;
    }
    if (domain_.notch && !poly.empty())
      poly = convex_minus_quadrant(poly, domain_.corner);
    if (poly.size() < 3 || !(polygon_area(poly) > 0))
      throw numerical_error("voronoi: empty or degenerate cell for seed " +
                            std::to_string(i));
    return poly;
  }

  void lloyd_step() {
    std::vector<Vec2> next(seeds_.size());
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      const Vec2 c = polygon_centroid(cell(i));
      next[i] = domain_.contains(c) ? c : seeds_[i];
    }
    seeds_ = std::move(next);
    rebuild_buckets();
  }

  std::size_t size() const { return seeds_.size(); }

 private:
  void rebuild_buckets() {
    buckets_.clear();
    for (std::size_t i = 0; i < seeds_.size(); ++i)
      buckets_[bucket_of(seeds_[i])].push_back(i);
  }

  std::pair<int, int> bucket_of(const Vec2& p) const {
    return {static_cast<int>(std::floor(p.x() / spacing_)),
            static_cast<int>(std::floor(p.y() / spacing_))};
  }

  // Seeds within `reach` buckets (Chebyshev) of seed i, sorted by distance.
  // Anything outside that block is at least reach*spacing away.
  std::vector<std::pair<double, std::size_t>> neighbors_within(std::size_t i,
                                                               int reach) const {
    const Vec2 si = seeds_[i];
    const auto [bi, bj] = bucket_of(si);
    std::vector<std::pair<double, std::size_t>> out;
    for (int dj = -reach; dj <= reach; ++dj)
      for (int di = -reach; di <= reach; ++di) {
        const auto it = buckets_.find({bi + di, bj + dj});
        if (it == buckets_.end()) continue;
        for (std::size_t j : it->second)
          if (j != i) out.emplace_back((seeds_[j] - si).squaredNorm(), j);
      }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first < b.first : a.second < b.second;
              });
    return out;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<int, int>& p) const {
      return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^
                                    static_cast<unsigned>(p.second));
    }
  };

  std::vector<Vec2> seeds_;
  ClipDomain domain_;
  double spacing_;
  std::unordered_map<std::pair<int, int>, std::vector<std::size_t>, PairHash> buckets_;
};

// Assemble a conforming mesh from per-cell polygons, merging vertices closer
// than `tol` (first occurrence wins so all incident cells agree exactly).
Mesh mesh_from_polygons(const std::vector<Polygon>& polys, double tol) {
  Mesh mesh;
  std::unordered_map<long long, std::vector<int>> grid;
  const double cell_size = std::max(tol * 4.0, 1e-300);
  auto key_of = [&](double x, double y) {
    const long long ix = static_cast<long long>(std::floor(x / cell_size));
    const long long iy = static_cast<long long>(std::floor(y / cell_size));
    return (ix << 32) ^ (iy & 0xffffffffLL);
  };
  auto vertex_id = [&](const Vec2& p) {
    const long long ix = static_cast<long long>(std::floor(p.x() / cell_size));
    const long long iy = static_cast<long long>(std::floor(p.y() / cell_size));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const long long key = ((ix + dx) << 32) ^ ((iy + dy) & 0xffffffffLL);
        const auto it = grid.find(key);
        if (it == grid.end()) continue;
        for (int id : it->second)
          if ((mesh.vertices[static_cast<std::size_t>(id)] - p).norm() <= tol)
            return id;
      }
    const int id = mesh.n_vertices();
    mesh.vertices.push_back(p);
    grid[key_of(p.x(), p.y())].push_back(id);
    return id;
  };
  for (const Polygon& poly : polys) {
    std::vector<int> ids;
    ids.reserve(poly.size());
    for (const Vec2& p : poly) ids.push_back(vertex_id(p));
    // drop consecutive repeats introduced by the merge
    std::vector<int> clean;
    for (int id : ids)
      if (clean.empty() || clean.back() != id) clean.push_back(id);
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
    Cell c;
    c.v = std::move(clean);
    Polygon geo;
    for (int id : c.v) geo.push_back(mesh.vertices[static_cast<std::size_t>(id)]);
    if (c.size() < 3 || !(polygon_area(geo) > 0))
      throw numerical_error("voronoi: degenerate cell after vertex merge");
    mesh.cells.push_back(std::move(c));
  }
  refresh_boundary_flags(mesh);
  return mesh;
}

// Boundary lines of the clip domain, used so edge collapses never move a
// vertex off the domain boundary (clip intersections pin coordinates exactly).
struct WallLine {
  int axis;        // 0: x == value, 1: y == value
  double value;
  double lo, hi;   // valid range of the other coordinate
};

std::vector<WallLine> domain_walls(const ClipDomain& d) {
  std::vector<WallLine> walls = {
      {0, d.lo.x(), d.lo.y(), d.hi.y()},
      {0, d.hi.x(), d.lo.y(), d.hi.y()},
      {1, d.lo.y(), d.lo.x(), d.hi.x()},
      {1, d.hi.y(), d.lo.x(), d.hi.x()},
  };
  if (d.notch) {
    walls.push_back({0, d.corner.x(), d.corner.y(), d.hi.y()});
    walls.push_back({1, d.corner.y(), d.corner.x(), d.hi.x()});
  }
  return walls;
}

int wall_score(const Vec2& p, const std::vector<WallLine>& walls) {
  int score = 0;
  for (const WallLine& w : walls) {
    const double on = p[w.axis];
    const double other = p[1 - w.axis];
    if (on == w.value && other >= w.lo && other <= w.hi) ++score;
  }
  return score;
}

// Collapse edges shorter than tol by merging their endpoints, preferring the
// endpoint that sits exactly on more domain boundary lines. Near-degenerate
// Voronoi vertices (almost cocircular seeds) otherwise produce edges a few
// orders of magnitude below the cell size.
Mesh collapse_short_edges(Mesh mesh, double tol,
                          const std::vector<WallLine>& walls) {
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<int> parent(static_cast<std::size_t>(mesh.n_vertices()));
    for (int i = 0; i < mesh.n_vertices(); ++i) parent[static_cast<std::size_t>(i)] = i;
    std::function<int(int)> find = [&](int a) {
      while (parent[static_cast<std::size_t>(a)] != a) {
        parent[static_cast<std::size_t>(a)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        a = parent[static_cast<std::size_t>(a)];
      }
      return a;
    };
    auto better = [&](int a, int b) {  // representative choice
      const int sa = wall_score(mesh.vertices[static_cast<std::size_t>(a)], walls);
      const int sb = wall_score(mesh.vertices[static_cast<std::size_t>(b)], walls);
      if (sa != sb) return sa > sb ? a : b;
      return a < b ? a : b;
    };
    bool any = false;
    for (const EdgeInfo& e : collect_edges(mesh)) {
      const double len = (mesh.vertices[static_cast<std::size_t>(e.a)] -
                          mesh.vertices[static_cast<std::size_t>(e.b)]).norm();
      if (len < tol) {
        const int ra = find(e.a), rb = find(e.b);
        if (ra != rb) {
          const int keep = better(ra, rb);
          parent[static_cast<std::size_t>(ra == keep ? rb : ra)] = keep;
          any = true;
        }
      }
    }
    if (!any) break;

    std::vector<int> remap(static_cast<std::size_t>(mesh.n_vertices()), -1);
    Mesh out;
    for (Cell& c : mesh.cells) {
      std::vector<int> loop;
      for (int id : c.v) {
        const int rep = find(id);
        int& nid = remap[static_cast<std::size_t>(rep)];
        if (nid < 0) {
          nid = out.n_vertices();
          out.vertices.push_back(mesh.vertices[static_cast<std::size_t>(rep)]);
        }
        if (loop.empty() || loop.back() != nid) loop.push_back(nid);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3)
        throw numerical_error("collapse_short_edges: cell degenerated");
      Cell nc;
      nc.v = std::move(loop);
      out.cells.push_back(std::move(nc));
    }
    mesh = std::move(out);
  }
  refresh_boundary_flags(mesh);
  return mesh;
}

std::vector<Vec2> lattice_seeds(int nx, int ny, const Vec2& lo, const Vec2& hi,
                                std::mt19937_64& rng, const ClipDomain& keep) {
  const double sx = (hi.x() - lo.x()) / nx;
  const double sy = (hi.y() - lo.y()) / ny;
  std::vector<Vec2> seeds;
  seeds.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double dx = uniform(rng, -0.25 * sx, 0.25 * sx);
      const double dy = uniform(rng, -0.25 * sy, 0.25 * sy);
      const Vec2 p(lo.x() + (i + 0.5) * sx + dx, lo.y() + (j + 0.5) * sy + dy);
      if (keep.contains(p)) seeds.push_back(p);
    }
  return seeds;
}

std::vector<Polygon> voronoi_cells(std::vector<Vec2> seeds, const ClipDomain& dom,
                                   double spacing, int lloyd_iterations) {
  VoronoiBuilder vb(std::move(seeds), dom, spacing);
  for (int it = 0; it < lloyd_iterations; ++it) vb.lloyd_step();
  std::vector<Polygon> cells;
  cells.reserve(vb.size());
  for (std::size_t i = 0; i < vb.size(); ++i) cells.push_back(vb.cell(i));
  return cells;
}

Mesh voronoi_mesh(Domain domain, int level, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 101));
  ClipDomain dom;
  if (domain == Domain::unit_square) {
    dom.lo = Vec2(0, 0);
    dom.hi = Vec2(1, 1);
  } else {
    dom.lo = Vec2(0, 0);
    dom.hi = Vec2(2, 2);
    dom.notch = true;
    dom.corner = Vec2(1, 1);
  }
  const double spacing = (dom.hi.x() - dom.lo.x()) / level;
  auto seeds = lattice_seeds(level, level, dom.lo, dom.hi, rng, dom);
  const auto cells = voronoi_cells(std::move(seeds), dom, spacing, 3);
  return collapse_short_edges(mesh_from_polygons(cells, 1e-12),
                              1e-3 * spacing, domain_walls(dom));
}

// Three independently seeded Voronoi strips of (0,1)^2 glued along their
// vertical interfaces. Vertices from both sides of an interface are kept;
// each interface edge is subdivided by the opposite side's nodes so the mesh
// stays conforming while near-duplicate nodes create arbitrarily small edges.
Mesh glued_voronoi_mesh(int level, std::uint64_t seed) {
  const int strips = 3;
  std::vector<Polygon> all_cells;
  for (int s = 0; s < strips; ++s) {
    std::mt19937_64 rng(mix_seed(seed, 7919 + static_cast<std::uint64_t>(s)));
    ClipDomain dom;
    dom.lo = Vec2(static_cast<double>(s) / strips, 0.0);
    dom.hi = Vec2(static_cast<double>(s + 1) / strips, 1.0);
    const int nx = std::max(1, (level + strips / 2) / strips);
    const int ny = level;
    auto seeds = lattice_seeds(nx, ny, dom.lo, dom.hi, rng, dom);
    const double spacing = std::max((dom.hi.x() - dom.lo.x()) / nx, 1.0 / ny);
    auto cells = voronoi_cells(std::move(seeds), dom, spacing, 3);
    Mesh strip = collapse_short_edges(mesh_from_polygons(cells, 1e-12),
                                      1e-3 * spacing, domain_walls(dom));
    for (int c = 0; c < strip.n_cells(); ++c)
      all_cells.push_back(strip.cell_polygon(c));
  }
  // Merge only coincident points (interface corners are exact); nearby but
  // distinct interface nodes survive as the intended small-edge stress case.
  Mesh mesh = mesh_from_polygons(all_cells, 1e-13);

  for (int s = 1; s < strips; ++s) {
    const double x_if = static_cast<double>(s) / strips;
    std::vector<int> on_line;
    for (int i = 0; i < mesh.n_vertices(); ++i)
      if (mesh.vertices[static_cast<std::size_t>(i)].x() == x_if)
        on_line.push_back(i);
    std::sort(on_line.begin(), on_line.end(), [&](int a, int b) {
      return mesh.vertices[static_cast<std::size_t>(a)].y() <
             mesh.vertices[static_cast<std::size_t>(b)].y();
    });
    for (Cell& c : mesh.cells) {
      std::vector<int> loop;
      const int m = c.size();
      for (int k = 0; k < m; ++k) {
        const int u = c.v[static_cast<std::size_t>(k)];
        const int w = c.v[static_cast<std::size_t>((k + 1) % m)];
        loop.push_back(u);
        const Vec2& pu = mesh.vertices[static_cast<std::size_t>(u)];
        const Vec2& pw = mesh.vertices[static_cast<std::size_t>(w)];
        if (pu.x() != x_if || pw.x() != x_if) continue;
        const double ylo = std::min(pu.y(), pw.y());
        const double yhi = std::max(pu.y(), pw.y());
        std::vector<int> inner;
        for (int id : on_line) {
          const double y = mesh.vertices[static_cast<std::size_t>(id)].y();
          if (y > ylo && y < yhi && id != u && id != w) inner.push_back(id);
        }
        if (pu.y() > pw.y()) std::reverse(inner.begin(), inner.end());
        loop.insert(loop.end(), inner.begin(), inner.end());
      }
      c.v = std::move(loop);
    }
  }
  refresh_boundary_flags(mesh);
  return mesh;
}

}  // namespace

Domain domain_from_string(const std::string& s) {
  if (s == "square" || s == "unit_square") return Domain::unit_square;
  if (s == "lshape") return Domain::lshape;
  throw std::invalid_argument("unknown domain '" + s + "' (square | lshape)");
}

MeshKind mesh_kind_from_string(const std::string& s) {
  if (s == "triangles") return MeshKind::triangles;
  if (s == "tri-mid") return MeshKind::deformed_triangles_midpoints;
  if (s == "dsquares") return MeshKind::deformed_squares;
  if (s == "squares") return MeshKind::squares;
  if (s == "voronoi") return MeshKind::voronoi;
  if (s == "gvoronoi") return MeshKind::glued_voronoi;
  throw std::invalid_argument(
      "unknown mesh kind '" + s +
      "' (triangles | tri-mid | dsquares | squares | voronoi | gvoronoi)");
}

std::string to_string(Domain d) {
  return d == Domain::unit_square ? "square" : "lshape";
}

std::string to_string(MeshKind k) {
  switch (k) {
    case MeshKind::triangles: return "triangles";
    case MeshKind::deformed_triangles_midpoints: return "tri-mid";
    case MeshKind::deformed_squares: return "dsquares";
    case MeshKind::squares: return "squares";
    case MeshKind::voronoi: return "voronoi";
    case MeshKind::glued_voronoi: return "gvoronoi";
  }
  return "?";
}

Mesh generate_mesh(Domain domain, MeshKind kind, int level, std::uint64_t seed) {
  if (level < 1) throw std::invalid_argument("generate_mesh: level must be >= 1");
  const bool structured = kind != MeshKind::voronoi && kind != MeshKind::glued_voronoi;
  if (domain == Domain::lshape) {
    if (kind == MeshKind::glued_voronoi)
      throw std::invalid_argument("generate_mesh: gvoronoi is defined on the unit square only");
    if (structured && level % 2 != 0)
      throw std::invalid_argument("generate_mesh: L-shape structured meshes need an even level");
  }

  Grid grid;
  grid.n = level;
  grid.len = domain == Domain::lshape ? 2.0 : 1.0;
  grid.lshape = domain == Domain::lshape;

  Mesh mesh;
  switch (kind) {
    case MeshKind::squares:
      mesh = structured_squares(grid);
      break;
    case MeshKind::triangles:
      mesh = structured_triangles(grid);
      break;
    case MeshKind::deformed_squares: {
      mesh = structured_squares(grid);
      std::mt19937_64 rng(mix_seed(seed, 11));
      deform_interior(mesh, 0.15 * mesh_metrics(mesh).h, rng);
      break;
    }
    case MeshKind::deformed_triangles_midpoints: {
      mesh = structured_triangles(grid);
      std::mt19937_64 rng(mix_seed(seed, 13));
      deform_interior(mesh, 0.15 * mesh_metrics(mesh).h, rng);
      mesh = split_edges_small(mesh, 0.5);
      break;
    }
    case MeshKind::voronoi:
      mesh = voronoi_mesh(domain, level, seed);
      break;
    case MeshKind::glued_voronoi:
      mesh = glued_voronoi_mesh(level, seed);
      break;
  }
  check_generated(mesh, to_string(domain) + "/" + to_string(kind) + "/" +
                            std::to_string(level));
  return mesh;
}

Mesh split_edges_small(const Mesh& mesh, double fraction) {
  if (!(fraction > 0.0 && fraction <= 0.5))
    throw std::invalid_argument("split_edges_small: fraction must lie in (0, 1/2]");
  Mesh out;
  out.vertices = mesh.vertices;

  const std::vector<EdgeInfo> edges = collect_edges(mesh);
  std::map<std::pair<int, int>, int> split_point;
  for (const EdgeInfo& e : edges) {
    const Vec2& pa = mesh.vertices[static_cast<std::size_t>(e.a)];
    const Vec2& pb = mesh.vertices[static_cast<std::size_t>(e.b)];
    split_point[{e.a, e.b}] = out.n_vertices();
    out.vertices.push_back(pa + fraction * (pb - pa));
  }

  for (const Cell& cell : mesh.cells) {
    Cell c;
    const int m = cell.size();
    c.v.reserve(static_cast<std::size_t>(2 * m));
    for (int s = 0; s < m; ++s) {
      const int u = cell.v[static_cast<std::size_t>(s)];
      const int w = cell.v[static_cast<std::size_t>((s + 1) % m)];
      c.v.push_back(u);
      c.v.push_back(split_point.at({std::min(u, w), std::max(u, w)}));
    }
    out.cells.push_back(std::move(c));
  }
  refresh_boundary_flags(out);
  return out;
}

}  // namespace vem
