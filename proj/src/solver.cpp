#include "vem/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cstdio>
#include <fstream>
#include <map>

namespace vem {

GlobalDofMap build_dof_map(const Mesh& mesh, int degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("build_dof_map: only k in {1,2}");
  const int nv = mesh.n_vertices();
  const int nc = mesh.n_cells();
  const std::vector<EdgeInfo> edges = collect_edges(mesh);
  const int ne = static_cast<int>(edges.size());

  std::map<std::pair<int, int>, int> edge_index;
  for (int e = 0; e < ne; ++e)
    edge_index[{edges[static_cast<std::size_t>(e)].a,
                edges[static_cast<std::size_t>(e)].b}] = e;

  GlobalDofMap map;
  map.degree = degree;
  map.n_dofs = 2 * nv + (degree == 2 ? 2 * ne + 2 * nc : 0);
  map.on_boundary.assign(static_cast<std::size_t>(map.n_dofs), 0);
  map.carrier.assign(static_cast<std::size_t>(map.n_dofs), Vec2::Zero());
  map.component.assign(static_cast<std::size_t>(map.n_dofs), 0);
  map.is_moment.assign(static_cast<std::size_t>(map.n_dofs), 0);

  for (int v = 0; v < nv; ++v)
    for (int c = 0; c < 2; ++c) {
      const int d = 2 * v + c;
      map.on_boundary[static_cast<std::size_t>(d)] = 0;
      map.carrier[static_cast<std::size_t>(d)] = mesh.vertices[static_cast<std::size_t>(v)];
      map.component[static_cast<std::size_t>(d)] = static_cast<std::uint8_t>(c);
    }
  for (const EdgeInfo& e : edges)
    if (e.boundary())
      for (int c = 0; c < 2; ++c) {
        map.on_boundary[static_cast<std::size_t>(2 * e.a + c)] = 1;
        map.on_boundary[static_cast<std::size_t>(2 * e.b + c)] = 1;
      }
  if (degree == 2) {
    for (int e = 0; e < ne; ++e) {
      const EdgeInfo& ei = edges[static_cast<std::size_t>(e)];
      const Vec2 mid = 0.5 * (mesh.vertices[static_cast<std::size_t>(ei.a)] +
                              mesh.vertices[static_cast<std::size_t>(ei.b)]);
      for (int c = 0; c < 2; ++c) {
        const int d = 2 * nv + 2 * e + c;
        map.on_boundary[static_cast<std::size_t>(d)] = ei.boundary() ? 1 : 0;
        map.carrier[static_cast<std::size_t>(d)] = mid;
        map.component[static_cast<std::size_t>(d)] = static_cast<std::uint8_t>(c);
      }
    }
    for (int cell = 0; cell < nc; ++cell)
      for (int c = 0; c < 2; ++c) {
        const int d = 2 * nv + 2 * ne + 2 * cell + c;
        map.carrier[static_cast<std::size_t>(d)] =
            polygon_centroid(mesh.cell_polygon(cell));
        map.component[static_cast<std::size_t>(d)] = static_cast<std::uint8_t>(c);
        map.is_moment[static_cast<std::size_t>(d)] = 1;
      }
  }

  map.cell_dofs.resize(static_cast<std::size_t>(nc));
  for (int cell = 0; cell < nc; ++cell) {
    const Cell& cl = mesh.cells[static_cast<std::size_t>(cell)];
    const int m = cl.size();
    const DofLayout layout = DofLayout::make(degree, m);
    std::vector<int>& dofs = map.cell_dofs[static_cast<std::size_t>(cell)];
    dofs.assign(static_cast<std::size_t>(layout.n_dofs()), -1);
    for (int i = 0; i < m; ++i)
      for (int c = 0; c < 2; ++c)
        dofs[static_cast<std::size_t>(layout.vertex_dof(i, c))] =
            2 * cl.v[static_cast<std::size_t>(i)] + c;
    if (degree == 2) {
      for (int s = 0; s < m; ++s) {
        const int u = cl.v[static_cast<std::size_t>(s)];
        const int w = cl.v[static_cast<std::size_t>((s + 1) % m)];
        const int e = edge_index.at({std::min(u, w), std::max(u, w)});
        for (int c = 0; c < 2; ++c)
          dofs[static_cast<std::size_t>(layout.edge_dof(s, c))] = 2 * nv + 2 * e + c;
      }
      for (int c = 0; c < 2; ++c)
        dofs[static_cast<std::size_t>(layout.moment_dof(c))] =
            2 * nv + 2 * ne + 2 * cell + c;
    }
  }
  return map;
}

SparseSystem assemble(const Mesh& mesh, const GlobalDofMap& map,
                      const Material& material, int degree, StabKind stab,
                      const VectorField& f) {
  SparseSystem sys;
  sys.b = Eigen::VectorXd::Zero(map.n_dofs);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    Eigen::MatrixXd K;
    Eigen::VectorXd F;
    try {
      const LocalOperators ops = element_operators(poly, material, degree);
      K = local_stiffness(poly, ops, stab);
      F = local_load(poly, ops, material, f);
    } catch (const numerical_error& err) {
      throw numerical_error("cell " + std::to_string(c) + ": " + err.what());
    }
    const std::vector<int>& dofs = map.cell_dofs[static_cast<std::size_t>(c)];
    const int nd = static_cast<int>(dofs.size());
    for (int i = 0; i < nd; ++i) {
      sys.b(dofs[static_cast<std::size_t>(i)]) += F(i);
      for (int j = 0; j < nd; ++j)
        triplets.emplace_back(dofs[static_cast<std::size_t>(i)],
                              dofs[static_cast<std::size_t>(j)], K(i, j));
    }
  }
  sys.A.resize(map.n_dofs, map.n_dofs);
  sys.A.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

ReducedSystem apply_dirichlet(const SparseSystem& system, const GlobalDofMap& map,
                              const VectorField& g) {
  ReducedSystem red;
  red.n_full = map.n_dofs;
  red.g = Eigen::VectorXd::Zero(map.n_dofs);
  std::vector<int> reduced_index(static_cast<std::size_t>(map.n_dofs), -1);
  for (int d = 0; d < map.n_dofs; ++d) {
    if (map.on_boundary[static_cast<std::size_t>(d)]) {
      const Vec2 val = g(map.carrier[static_cast<std::size_t>(d)]);
      red.g(d) = val(map.component[static_cast<std::size_t>(d)]);
    } else {
      reduced_index[static_cast<std::size_t>(d)] = static_cast<int>(red.interior.size());
      red.interior.push_back(d);
    }
  }
  const int n = static_cast<int>(red.interior.size());
  red.b.resize(n);
  for (int i = 0; i < n; ++i) red.b(i) = system.b(red.interior[static_cast<std::size_t>(i)]);

  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < system.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, col); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      const int ri = reduced_index[static_cast<std::size_t>(i)];
      const int rj = reduced_index[static_cast<std::size_t>(j)];
      if (ri >= 0 && rj >= 0)
        triplets.emplace_back(ri, rj, it.value());
      else if (ri >= 0 && rj < 0)
        red.b(ri) -= it.value() * red.g(j);
    }
  }
  red.A.resize(n, n);
  red.A.setFromTriplets(triplets.begin(), triplets.end());
  return red;
}

namespace {

double inf_norm(const Eigen::SparseMatrix<double>& A) {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(A.rows());
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
      rowsum(it.row()) += std::abs(it.value());
  return rowsum.maxCoeff();
}

// Normwise backward error |Ax-b| / (|A| |x| + |b|): the achievable measure
// for large stiff systems, where eps * |A| |x| can exceed 1e-10 * |b| even
// for an exact-arithmetic-quality solution.
double backward_error(const Eigen::SparseMatrix<double>& A, double anorm,
                      const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double denom = anorm * x.norm() + b.norm();
  if (denom == 0) return 0.0;
  return (b - A * x).norm() / denom;
}

}  // namespace

Solution solve(const ReducedSystem& system, SolveMethod method) {
  Solution sol;
  sol.u = system.g;
  if (system.interior.empty()) {
    sol.method = "none";
    return sol;
  }

  const double anorm = inf_norm(system.A);
  Eigen::VectorXd x;
  bool done = false;
  if (method == SolveMethod::automatic || method == SolveMethod::direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(system.A);
    if (ldlt.info() == Eigen::Success) {
      x = ldlt.solve(system.b);
      for (int pass = 0; pass < 3; ++pass) {
        if (backward_error(system.A, anorm, x, system.b) <= 1e-14) break;
        x += ldlt.solve(system.b - system.A * x);
      }
      sol.method = "ldlt";
      done = true;
    } else if (method == SolveMethod::direct) {
      throw numerical_error("solve: sparse LDLT factorization failed");
    }
  }
  if (!done) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20 * system.A.rows());
    cg.compute(system.A);
    x = cg.solve(system.b);
    sol.method = "cg";
    sol.iterations = static_cast<int>(cg.iterations());
  }

  sol.residual = backward_error(system.A, anorm, x, system.b);
  if (!(sol.residual <= 1e-10)) {
    dump_system(system, "vem_failed_system.txt");
    throw numerical_error("solve: backward error " + std::to_string(sol.residual) +
                          " above 1e-10 (" + sol.method +
                          "); system dumped to vem_failed_system.txt");
  }
  for (std::size_t i = 0; i < system.interior.size(); ++i)
    sol.u(system.interior[i]) = x(static_cast<long>(i));
  return sol;
}

void dump_system(const ReducedSystem& system, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("dump_system: cannot open " + path);
  long nnz = 0;
  for (int col = 0; col < system.A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, col); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  out << "%%sym-coord\n" << system.A.rows() << " " << nnz << "\n";
  char buf[96];
  for (int col = 0; col < system.A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, col); it; ++it)
      if (it.row() >= it.col()) {
        std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                      static_cast<long>(it.row()) + 1,
                      static_cast<long>(it.col()) + 1, it.value());
        out << buf;
      }
}

Eigen::VectorXd interpolate_global(const Mesh& mesh, const GlobalDofMap& map,
                                   int degree, const VectorField& u) {
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(map.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd local = interpolate_local(mesh.cell_polygon(c), degree, u);
    const std::vector<int>& cd = map.cell_dofs[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < cd.size(); ++i) dofs(cd[i]) = local(static_cast<long>(i));
  }
  return dofs;
}

}  // namespace vem
