#pragma once

#include <cstdint>
#include <string>

#include "vem/types.hpp"

namespace vem {

/// Polygonal cell: CCW-ordered indices into the mesh vertex array.
struct Cell {
  std::vector<int> v;
  int size() const { return static_cast<int>(v.size()); }
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Cell> cells;
  std::vector<std::uint8_t> boundary_vertex;  // 1 iff the vertex lies on the mesh boundary

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  Polygon cell_polygon(int c) const;
};

/// Undirected mesh edge in canonical (a < b) vertex order with its incident
/// cells; side k of cell c runs from v[k] to v[(k+1) % size].
struct EdgeInfo {
  int a = -1, b = -1;
  int cell0 = -1, side0 = -1;
  int cell1 = -1, side1 = -1;
  bool boundary() const { return cell1 < 0; }
};

/// All undirected edges, sorted by (a, b). Throws numerical_error if an edge
/// is used by more than two cells.
std::vector<EdgeInfo> collect_edges(const Mesh& mesh);

/// Recompute boundary_vertex flags from edge incidence counts.
void refresh_boundary_flags(Mesh& mesh);

double polygon_area(const Polygon& p);       // signed (positive for CCW)
Vec2 polygon_centroid(const Polygon& p);
double polygon_diameter(const Polygon& p);   // max pairwise vertex distance
double polygon_perimeter(const Polygon& p);

struct CellMetrics {
  double h = 0;         // cell diameter
  double area = 0;
  double perimeter = 0;
  double min_edge = 0;
  double rho_hat = 0;   // min distance from centroid to an edge line
};

struct MeshMetrics {
  double h = 0;         // max over cells of CellMetrics::h
  std::vector<CellMetrics> per_cell;
};

MeshMetrics mesh_metrics(const Mesh& mesh);

/// Diagnostic pass over all mesh and cell invariants. Returns one message per
/// violation (empty means the mesh is valid); never throws on bad geometry.
std::vector<std::string> validate_mesh(const Mesh& mesh);

/// Text format:
///   polymesh2d 1
///   <nv> <nc>
///   x y b        (nv lines, b in {0,1})
///   m i1 ... im  (nc lines, 0-based CCW vertex indices)
/// '#' starts a comment. Coordinates are written with 17 significant digits
/// so a save/load round trip reproduces them bit for bit.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace vem
