#pragma once

#include <cstdint>
#include <string>

#include "vem/geometry.hpp"

namespace vem {

enum class Domain { unit_square, lshape };

enum class MeshKind {
  triangles,
  deformed_triangles_midpoints,
  deformed_squares,
  squares,
  voronoi,
  glued_voronoi,
};

Domain domain_from_string(const std::string& s);      // square | lshape
MeshKind mesh_kind_from_string(const std::string& s); // triangles | tri-mid | dsquares | squares | voronoi | gvoronoi
std::string to_string(Domain d);
std::string to_string(MeshKind k);

/// Deterministic mesh generation. `level` n targets an n x n structured
/// resolution (or about n^2 Voronoi seeds); `seed` drives all randomness.
/// The L-shaped domain is (0,2)^2 minus the quadrant [1,2)^2; its structured
/// families need an even level so gridlines hit the reentrant corner.
/// Degenerate output (a zero-area or self-intersecting cell) throws
/// numerical_error instead of being repaired.
Mesh generate_mesh(Domain domain, MeshKind kind, int level, std::uint64_t seed);

/// Insert one interior point on every edge at arclength fraction*|e| from the
/// edge's canonical first endpoint (the lower vertex index), so both incident
/// cells see the same point; a triangle becomes a hexagon. fraction in (0, 1/2].
Mesh split_edges_small(const Mesh& mesh, double fraction = 0.02);

}  // namespace vem
