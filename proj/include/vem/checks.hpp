#pragma once

#include <cstdint>
#include <string>

#include "vem/study.hpp"

namespace vem {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0;      // worst observed residual/deviation
  double gate = 0;       // threshold it was held against
  std::string detail;
};

/// Per-cell invariant suites on randomized polygons (including cells with a
/// 1/50 edge split), both degrees and both stabilizations:
/// projector idempotence and polynomial reproduction, boundary-average and
/// rot constraint residuals, stiffness symmetry and rigid kernel, the
/// quadrature-vs-moments oracle, the stiffness consistency oracle, and the
/// finite-difference oracle for the manufactured loads.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed = 0,
                                              int n_cells = 200);

/// Global patch tests: exact degree-k polynomial solutions imposed through
/// inhomogeneous Dirichlet data on every mesh kind and both stabilizations.
std::vector<CheckResult> run_patch_checks(int level = 4);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace vem
