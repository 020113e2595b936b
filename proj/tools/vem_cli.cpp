// Command-line front end: convergence studies, single solves, mesh
// generation, and the invariant check suites.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vem/checks.hpp"
#include "vem/study.hpp"

namespace {

struct Options {
  std::string domain = "square";
  std::string mesh = "squares";
  bool small_edges = false;
  double edge_fraction = 0.02;
  int k = 1;
  double nu = 0.35;
  double young = 1.0;
  double rho = 1.0;
  std::string stab = "dtangent";
  std::string levels = "8,16,32";
  int level = 8;
  std::string solution = "sine";
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
  int cells = 200;
  std::string dump;
};

std::vector<int> parse_levels(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size())
      throw std::invalid_argument("bad level '" + tok + "' in --levels");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--levels is empty");
  return out;
}

vem::StabKind stab_from_string(const std::string& s) {
  if (s == "dtangent") return vem::StabKind::derivative;
  if (s == "dofi") return vem::StabKind::classic;
  throw std::invalid_argument("unknown stabilization '" + s + "' (dofi | dtangent)");
}

// Flat `key = value` configuration support: file entries are turned into
// flags placed before the explicit command line, so explicit flags win.
std::vector<std::string> config_to_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
      if (blank) continue;
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

void echo_config(const Options& o, bool with_levels, bool with_level) {
  std::printf("# resolved-config\n");
  std::printf("domain = %s\n", o.domain.c_str());
  std::printf("mesh = %s\n", o.mesh.c_str());
  std::printf("small-edges = %s\n", o.small_edges ? "true" : "false");
  std::printf("edge-fraction = %.17g\n", o.edge_fraction);
  std::printf("k = %d\n", o.k);
  std::printf("nu = %.17g\n", o.nu);
  std::printf("young = %.17g\n", o.young);
  std::printf("rho = %.17g\n", o.rho);
  std::printf("stab = %s\n", o.stab.c_str());
  if (with_levels) std::printf("levels = %s\n", o.levels.c_str());
  if (with_level) std::printf("level = %d\n", o.level);
  std::printf("solution = %s\n", o.solution.c_str());
  std::printf("seed = %llu\n", static_cast<unsigned long long>(o.seed));
  if (!o.out.empty()) std::printf("out = %s\n", o.out.c_str());
  std::fflush(stdout);
}

void print_rows(const std::vector<vem::StudyRow>& rows) {
  std::printf("%6s %12s %8s %14s %14s %9s %9s\n", "level", "h", "ndof",
              "err_l2", "err_h1", "rate_l2", "rate_h1");
  for (const vem::StudyRow& r : rows) {
    std::printf("%6d %12.5e %8d %14.6e %14.6e", r.level, r.h, r.ndof, r.err_l2,
                r.err_h1);
    if (std::isnan(r.rate_l2))
      std::printf(" %9s %9s\n", "-", "-");
    else
      std::printf(" %9.3f %9.3f\n", r.rate_l2, r.rate_h1);
  }
}

int run_study_cmd(const Options& o) {
  vem::StudyConfig cfg;
  cfg.domain = vem::domain_from_string(o.domain);
  cfg.kind = vem::mesh_kind_from_string(o.mesh);
  cfg.small_edges = o.small_edges;
  cfg.edge_fraction = o.edge_fraction;
  cfg.degree = o.k;
  cfg.levels = parse_levels(o.levels);
  cfg.young = o.young;
  cfg.poisson = o.nu;
  cfg.density = o.rho;
  cfg.stab = stab_from_string(o.stab);
  cfg.solution = o.solution;
  cfg.out_csv = o.out;
  cfg.seed = o.seed;
  if (!o.quiet) echo_config(o, true, false);
  const std::vector<vem::StudyRow> rows = vem::run_study(cfg);
  if (!o.quiet) {
    print_rows(rows);
    if (!o.out.empty()) std::printf("csv written to %s\n", o.out.c_str());
  }
  return 0;
}

int run_solve_cmd(const Options& o) {
  if (!o.quiet) echo_config(o, false, true);
  const vem::Material mat = vem::make_material(o.young, o.nu, o.rho);
  const vem::ManufacturedSolution sol = vem::manufactured(o.solution, mat);
  if (o.solution == "poly3" && o.domain != "square")
    throw std::invalid_argument("poly3 is defined on the unit square only");
  vem::Mesh mesh = vem::generate_mesh(vem::domain_from_string(o.domain),
                                      vem::mesh_kind_from_string(o.mesh),
                                      o.level, o.seed);
  if (o.small_edges) mesh = vem::split_edges_small(mesh, o.edge_fraction);
  const vem::GlobalDofMap map = vem::build_dof_map(mesh, o.k);
  const vem::SparseSystem sys =
      vem::assemble(mesh, map, mat, o.k, stab_from_string(o.stab), sol.f);
  const vem::VectorField zero = [](const vem::Vec2&) { return vem::Vec2::Zero(); };
  const vem::ReducedSystem red = vem::apply_dirichlet(sys, map, zero);
  const vem::Solution solution = vem::solve(red);
  if (!o.dump.empty()) vem::dump_system(red, o.dump);

  const auto [el2, eh1] = vem::error_norms(mesh, map, o.k, mat, sol, solution.u);
  if (!o.quiet)
    std::printf("solved %d dofs via %s (residual %.3e), err_l2 %.6e err_h1 %.6e\n",
                map.n_dofs, solution.method.c_str(), solution.residual, el2, eh1);

  if (!o.out.empty()) {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open " + o.out);
    char buf[160];
    out << "# vem solution: dof values, then per-cell centroid samples of the projected field\n";
    out << "ndof " << map.n_dofs << "\n";
    for (int i = 0; i < map.n_dofs; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", solution.u(i));
      out << buf;
    }
    out << "cells " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const vem::Polygon poly = mesh.cell_polygon(c);
      const vem::LocalOperators ops = vem::element_operators(poly, mat, o.k);
      const std::vector<int>& cd = map.cell_dofs[static_cast<std::size_t>(c)];
      Eigen::VectorXd local(cd.size());
      for (std::size_t i = 0; i < cd.size(); ++i)
        local(static_cast<long>(i)) = solution.u(cd[i]);
      const Eigen::VectorXd coeff = ops.pi_star * local;
      const Eigen::VectorXd vals = vem::eval_basis(ops.basis, ops.basis.center);
      const int nk = ops.basis.size();
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n",
                    ops.basis.center.x(), ops.basis.center.y(),
                    coeff.head(nk).dot(vals), coeff.tail(nk).dot(vals));
      out << buf;
    }
    if (!o.quiet) std::printf("solution written to %s\n", o.out.c_str());
  }
  return 0;
}

int run_mesh_cmd(const Options& o) {
  if (!o.quiet) echo_config(o, false, true);
  vem::Mesh mesh = vem::generate_mesh(vem::domain_from_string(o.domain),
                                      vem::mesh_kind_from_string(o.mesh),
                                      o.level, o.seed);
  if (o.small_edges) mesh = vem::split_edges_small(mesh, o.edge_fraction);
  if (o.out.empty()) throw std::invalid_argument("mesh: --out is required");
  vem::save_mesh(mesh, o.out);
  if (!o.quiet) {
    const vem::MeshMetrics mm = vem::mesh_metrics(mesh);
    double min_edge = std::numeric_limits<double>::infinity();
    for (const vem::CellMetrics& cm : mm.per_cell)
      min_edge = std::min(min_edge, cm.min_edge);
    std::printf("mesh: %d vertices, %d cells, h %.5e, min edge %.5e -> %s\n",
                mesh.n_vertices(), mesh.n_cells(), mm.h, min_edge, o.out.c_str());
  }
  return 0;
}

int run_check_cmd(const Options& o) {
  bool ok = true;
  auto report = [&](const std::vector<vem::CheckResult>& results) {
    for (const vem::CheckResult& r : results) {
      ok = ok && r.pass;
      std::printf("%-52s %s  (worst %.3e, gate %.0e)%s%s\n", r.name.c_str(),
                  r.pass ? "pass" : "FAIL", r.worst, r.gate,
                  r.detail.empty() ? "" : "  ", r.detail.c_str());
    }
  };
  report(vem::run_invariant_checks(o.seed, o.cells));
  report(vem::run_patch_checks());
  std::printf("check: %s\n", ok ? "all suites passed" : "FAILURES detected");
  if (!ok) throw vem::numerical_error("invariant check suites failed");
  return 0;
}

void add_common(CLI::App* cmd, Options& o, bool with_levels, bool with_level) {
  cmd->add_option("--domain", o.domain, "square | lshape");
  cmd->add_option("--mesh", o.mesh,
                  "triangles | tri-mid | dsquares | squares | voronoi | gvoronoi");
  cmd->add_flag("--small-edges", o.small_edges,
                "split every edge at --edge-fraction of its length");
  cmd->add_option("--edge-fraction", o.edge_fraction, "split fraction in (0, 1/2]");
  cmd->add_option("--k", o.k, "polynomial degree, 1 or 2");
  cmd->add_option("--nu", o.nu, "Poisson ratio, < 1/2");
  cmd->add_option("--young", o.young, "Young modulus");
  cmd->add_option("--rho", o.rho, "material density");
  cmd->add_option("--stab", o.stab, "dofi | dtangent");
  if (with_levels) cmd->add_option("--levels", o.levels, "comma-separated levels");
  if (with_level) cmd->add_option("--level", o.level, "refinement level");
  cmd->add_option("--solution", o.solution, "sine | poly3");
  cmd->add_option("--seed", o.seed, "seed for all randomness");
  cmd->add_option("--out", o.out, "output path");
  cmd->add_flag("--quiet", o.quiet, "suppress progress lines");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for planar linear elasticity on polygonal meshes"};
  app.require_subcommand(1);
  Options o;

  CLI::App* study = app.add_subcommand("study", "run a refinement study and emit CSV");
  add_common(study, o, true, false);

  CLI::App* solve = app.add_subcommand("solve", "solve one level and write the solution");
  add_common(solve, o, false, true);
  solve->add_option("--dump-system", o.dump, "write the reduced system in sym-coord format");

  CLI::App* mesh = app.add_subcommand("mesh", "generate a mesh file");
  add_common(mesh, o, false, true);

  CLI::App* check = app.add_subcommand("check", "run the invariant and patch suites");
  check->add_option("--seed", o.seed, "seed for randomized cells");
  check->add_option("--cells", o.cells, "number of randomized cells");
  check->add_flag("--quiet", o.quiet, "suppress progress lines");

  // Expand --config FILE into flags ahead of the explicit ones.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    std::vector<std::string> expanded;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
        std::string path;
        if (args[i] == "--config") {
          if (i + 1 >= args.size())
            throw std::invalid_argument("--config needs a file argument");
          path = args[++i];
        } else {
          path = args[i].substr(9);
        }
        const std::vector<std::string> file_args = config_to_args(path);
        // file entries go right after the subcommand so explicit flags override
        expanded.insert(expanded.begin() + 1, file_args.begin(), file_args.end());
      } else {
        expanded.push_back(args[i]);
      }
    }
    for (auto* cmd : {study, solve, mesh, check})
      for (CLI::Option* opt : cmd->get_options())
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const std::string& a : expanded) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (study->parsed()) return run_study_cmd(o);
    if (solve->parsed()) return run_solve_cmd(o);
    if (mesh->parsed()) return run_mesh_cmd(o);
    if (check->parsed()) return run_check_cmd(o);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const vem::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
}
