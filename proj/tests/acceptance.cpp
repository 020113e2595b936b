// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vem/checks.hpp"
#include "vem/study.hpp"

using namespace vem;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  double seconds;
  std::string detail;
};

std::vector<Outcome> outcomes;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void record(int id, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  outcomes.push_back({id, name, pass, seconds, detail});
  std::printf("[%d] %-28s %s  (%.1fs)%s%s\n", id, name.c_str(),
              pass ? "PASS" : "FAIL", seconds, detail.empty() ? "" : "  ",
              detail.c_str());
  std::fflush(stdout);
}

char buf[512];

// mean of the last two pairwise rates, damping preasymptotic wiggle
std::pair<double, double> terminal_rates(const std::vector<StudyRow>& rows) {
  const std::size_t n = rows.size();
  return {(rows[n - 1].rate_l2 + rows[n - 2].rate_l2) / 2.0,
          (rows[n - 1].rate_h1 + rows[n - 2].rate_h1) / 2.0};
}

StudyConfig base_study(MeshKind kind, int degree, double nu, StabKind stab,
                       const std::string& solution = "sine") {
  StudyConfig cfg;
  cfg.domain = Domain::unit_square;
  cfg.kind = kind;
  cfg.degree = degree;
  cfg.levels = {8, 16, 32, 64};
  cfg.poisson = nu;
  cfg.stab = stab;
  cfg.solution = solution;
  return cfg;
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

void criterion1_patch() {
  Timer t;
  bool pass = true;
  std::string detail;
  double worst = 0;
  try {
    for (const CheckResult& r : run_patch_checks(8)) {
      worst = std::max(worst, r.worst);
      if (!r.pass) {
        pass = false;
        detail = r.name + ": " + r.detail;
        break;
      }
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  const double sec = t.seconds();
  if (sec > 10.0) {
    pass = false;
    detail += " runtime above 10 s";
  }
  if (detail.empty()) {
    std::snprintf(buf, sizeof(buf), "worst rel err %.2e vs gate 1e-9", worst);
    detail = buf;
  }
  record(1, "patch test", pass, sec, detail);
}

void criterion2_rates() {
  for (const int k : {1, 2}) {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
      const auto rows = run_study(base_study(
          MeshKind::deformed_triangles_midpoints, k, 0.35, StabKind::derivative));
      const auto [rl2, rh1] = terminal_rates(rows);
      const double lo_h1 = k == 1 ? 0.85 : 1.8;
      const double hi_h1 = k == 1 ? 1.15 : 2.2;
      const double lo_l2 = k == 1 ? 1.8 : 2.7;
      const double hi_l2 = k == 1 ? 2.2 : 3.3;
      pass = in_band(rh1, lo_h1, hi_h1) && in_band(rl2, lo_l2, hi_l2);
      std::snprintf(buf, sizeof(buf),
                    "k=%d terminal rates l2 %.3f in [%.1f,%.1f], h1 %.3f in [%.2f,%.2f]",
                    k, rl2, lo_l2, hi_l2, rh1, lo_h1, hi_h1);
      detail = buf;
    } catch (const std::exception& e) {
      pass = false;
      detail = e.what();
    }
    const double sec = t.seconds();
    if (sec > 120.0) {
      pass = false;
      detail += " runtime above 120 s";
    }
    record(2, "optimal rates k=" + std::to_string(k), pass, sec, detail);
  }
}

void criterion3_small_edges() {
  for (const int k : {1, 2}) {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
      StudyConfig plain = base_study(MeshKind::triangles, k, 0.35, StabKind::derivative);
      StudyConfig split = plain;
      split.small_edges = true;
      split.edge_fraction = 0.02;
      const auto [pl2, ph1] = terminal_rates(run_study(plain));
      const auto [sl2, sh1] = terminal_rates(run_study(split));
      pass = std::abs(pl2 - sl2) <= 0.1 && std::abs(ph1 - sh1) <= 0.1;
      std::snprintf(buf, sizeof(buf),
                    "k=%d rate deltas split-vs-plain l2 %.3f h1 %.3f (gate 0.1)", k,
                    std::abs(pl2 - sl2), std::abs(ph1 - sh1));
      detail = buf;
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("solver failure: ") + e.what();
    }
    record(3, "small-edge robustness k=" + std::to_string(k), pass, t.seconds(),
           detail);
  }
}

void criterion4_stab_equivalence() {
  for (const int k : {1, 2}) {
    Timer t;
    bool pass = true;
    std::string detail;
    try {
      const auto a = run_study(base_study(MeshKind::deformed_triangles_midpoints, k,
                                          0.35, StabKind::derivative));
      const auto b = run_study(base_study(MeshKind::deformed_triangles_midpoints, k,
                                          0.35, StabKind::classic));
      double worst = 0;
      for (std::size_t i = 1; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i].rate_l2 - b[i].rate_l2));
        worst = std::max(worst, std::abs(a[i].rate_h1 - b[i].rate_h1));
      }
      pass = worst < 0.15;
      std::snprintf(buf, sizeof(buf), "k=%d max per-pair rate delta %.3f (gate 0.15)",
                    k, worst);
      detail = buf;
    } catch (const std::exception& e) {
      pass = false;
      detail = e.what();
    }
    record(4, "stabilization equivalence k=" + std::to_string(k), pass, t.seconds(),
           detail);
  }
}

void criterion5_locking() {
  Timer t;
  bool pass = true;
  std::string detail;
  try {
    std::vector<double> errs;
    for (const double nu : {0.35, 0.45, 0.47, 0.49}) {
      StudyConfig cfg = base_study(MeshKind::squares, 1, nu, StabKind::derivative,
                                   "divfree");
      cfg.levels = {32};
      errs.push_back(run_study(cfg)[0].err_h1);
    }
    for (std::size_t i = 1; i < errs.size(); ++i)
      if (errs[i] < errs[i - 1]) pass = false;

    StudyConfig vor = base_study(MeshKind::voronoi, 1, 0.49, StabKind::derivative,
                                 "divfree");
    const auto [rl2, rh1] = terminal_rates(run_study(vor));
    if (rh1 < 0.7) pass = false;
    std::snprintf(buf, sizeof(buf),
                  "err_h1 over nu: %.5f %.5f %.5f %.5f; voronoi nu=0.49 terminal h1 "
                  "rate %.3f (>= 0.7)",
                  errs[0], errs[1], errs[2], errs[3], rh1);
    detail = buf;
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  record(5, "locking trend", pass, t.seconds(), detail);
}

void criterion6_glued() {
  Timer t;
  bool pass = true;
  std::string detail;
  try {
    std::string parts;
    for (const StabKind stab : {StabKind::derivative, StabKind::classic}) {
      const auto rows =
          run_study(base_study(MeshKind::glued_voronoi, 1, 0.35, stab));
      const auto [rl2, rh1] = terminal_rates(rows);
      if (!in_band(rl2, 1.8, 2.2) || !in_band(rh1, 0.85, 1.15)) pass = false;
      std::snprintf(buf, sizeof(buf), "%s l2 %.3f h1 %.3f  ",
                    stab == StabKind::derivative ? "dtangent" : "dofi", rl2, rh1);
      parts += buf;
    }
    detail = parts + "(bands [1.8,2.2] / [0.85,1.15])";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  record(6, "glued-voronoi stress case", pass, t.seconds(), detail);
}

void criterion7_invariants() {
  Timer t;
  bool pass = true;
  std::string detail;
  try {
    for (const CheckResult& r : run_invariant_checks(0, 200))
      if (!r.pass) {
        pass = false;
        detail = r.name + ": " + r.detail;
      }
    for (const CheckResult& r : run_patch_checks(4))
      if (!r.pass) {
        pass = false;
        detail = r.name + ": " + r.detail;
      }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  const double sec = t.seconds();
  if (sec > 30.0) {
    pass = false;
    detail += " runtime above 30 s";
  }
  if (detail.empty()) detail = "all suites green on 200 randomized cells";
  record(7, "invariant suites", pass, sec, detail);
}

void criterion8_lshape() {
  Timer t;
  bool pass = true;
  std::string detail;
  try {
    std::string parts;
    for (const MeshKind kind :
         {MeshKind::triangles, MeshKind::deformed_triangles_midpoints,
          MeshKind::deformed_squares, MeshKind::voronoi}) {
      StudyConfig cfg = base_study(kind, 1, 0.35, StabKind::classic);
      cfg.domain = Domain::lshape;
      cfg.levels = {8, 16, 32};
      const auto [rl2, rh1] = terminal_rates(run_study(cfg));
      if (!in_band(rl2, 1.8, 2.2) || !in_band(rh1, 0.85, 1.15)) pass = false;
      std::snprintf(buf, sizeof(buf), "%s (%.2f, %.2f)  ", to_string(kind).c_str(),
                    rl2, rh1);
      parts += buf;
    }
    detail = parts;
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("solver failure: ") + e.what();
  }
  record(8, "L-shape smooth run", pass, t.seconds(), detail);
}

}  // namespace

int main() {
  criterion1_patch();
  criterion2_rates();
  criterion3_small_edges();
  criterion4_stab_equivalence();
  criterion5_locking();
  criterion6_glued();
  criterion7_invariants();
  criterion8_lshape();

  int failures = 0;
  for (const Outcome& o : outcomes) failures += o.pass ? 0 : 1;
  std::printf("acceptance: %zu checks, %d failure%s\n", outcomes.size(), failures,
              failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
