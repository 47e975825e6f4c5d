// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mheat/certify.hpp"
#include "mheat/config.hpp"
#include "mheat/discrete_ops.hpp"
#include "mheat/error.hpp"
#include "mheat/mms.hpp"
#include "mheat/operators.hpp"
#include "mheat/output.hpp"
#include "mheat/presets.hpp"
#include "mheat/rothe.hpp"
#include "mheat/solver.hpp"
#include "mheat/studies.hpp"
#include "oracles.hpp"

using namespace mheat;
using mheat::oracle::dense;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  double budget_seconds;
  std::function<Outcome()> body;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RunManifest default_manifest() {
  return parse_config(std::string(MHEAT_SOURCE_DIR) + "/configs/default.cfg");
}

// Largest regularised source seen by any run in this binary, relative to its bound.
double g_worst_source_excess = -std::numeric_limits<double>::infinity();
int g_runs_checked = 0;

void track_source(const RunResult& r) {
  const double bound = r.config.q_max() / r.config.epsilon;
  g_worst_source_excess = std::max(g_worst_source_excess, r.max_source - bound);
  ++g_runs_checked;
}

RunResult tracked_run(const Problem& pb, const RunOptions& opt = {}) {
  RunResult r = run(pb, opt);
  if (!r.ok()) throw Error(r.error_kind, "acceptance", *r.error);
  track_source(r);
  return r;
}

double weighted_sq(const Vector& w, const Vector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return s;
}

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Outcome ac1() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_cg = 0.0, worst_adj = 0.0;
  for (int n : {2, 3, 4, 8}) {
    const auto g = build_grid({1, 1, 1}, {n, n, n}, {BoxFace::ZMinus});
    for (int trial = 0; trial < 100; ++trial) {
      NodeField w(g.node_count());
      for (double& x : w) x = u(rng);
      const EdgeField gw = grad(g, w);
      worst_cg = std::max(worst_cg, max_abs(curl(g, gw)) / max_abs(gw));

      for (int i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary_node(i)) w[i] = 0.0;
      }
      EdgeField e(g.edge_count());
      for (double& x : e) x = u(rng);
      const double a = inner(g, InnerKind::Edge, grad(g, w), e);
      const double b = inner(g, InnerKind::Node, w, divergence(g, e));
      worst_adj = std::max(worst_adj, std::abs(a + b) / (std::abs(a) + std::abs(b)));
    }
  }
  return {worst_cg <= 1e-12 && worst_adj <= 1e-12,
          "max |curl grad w|/|grad w| " + num(worst_cg) + ", adjointness rel " + num(worst_adj)};
}

Outcome ac2() {
  const auto g = build_grid({1, 1, 1}, {2, 2, 2}, {BoxFace::ZMinus});
  ModelConfig m;
  m.tau = 0.05;
  m.t_final = 0.5;
  const CertificationReport r = certify(Lemma::LipschitzQuench, Problem(g, m), 1000000, 2);
  return {r.pass && r.samples == 1000000 && r.measured_constant <= 2.25,
          std::to_string(r.samples) + " samples, max ratio " + num(r.measured_constant) + " <= 9/4"};
}

Outcome ac3() {
  const auto g = build_grid({1, 1, 1}, {2, 2, 2}, {BoxFace::ZMinus});
  ModelConfig m;
  m.tau = 0.05;
  m.t_final = 0.5;
  const CertificationReport r = certify(Lemma::MonotonePsi, Problem(g, m), 100000, 3);
  double sharp = std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : r.extra) {
    if (k == "sharpness_rel_error") sharp = v;
  }
  return {r.pass && r.samples == 100000 && sharp <= 1e-12,
          std::to_string(r.samples) + " samples, min margin " + num(r.margin) + ", sharpness error " + num(sharp)};
}

Outcome ac4() {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  RunManifest man = default_manifest();
  const Problem pb(g, man.model, man.solver);
  const OperatorConstants k = operator_constants(pb);
  bool ok = k.C4_condition > 0.0 && k.C6_condition > 0.0;
  std::string detail;
  for (Lemma l : {Lemma::BoundedP, Lemma::BoundedL, Lemma::CoerciveP, Lemma::CoerciveL, Lemma::MonotoneP,
                  Lemma::MonotoneL}) {
    const CertificationReport r = certify(l, pb, 100, 4);
    bool this_ok = r.pass && r.samples >= 100;
    if (l == Lemma::BoundedP || l == Lemma::BoundedL) {
      this_ok = this_ok && r.measured_constant <= r.theoretical_bound * (1.0 + 1e-10);
    } else {
      this_ok = this_ok && r.measured_constant >= r.theoretical_bound - 1e-10;
    }
    ok = ok && this_ok;
    detail += std::string(to_string(l)) + " " + num(r.measured_constant) + (l == Lemma::BoundedP || l == Lemma::BoundedL ? "<=" : ">=") +
              num(r.theoretical_bound) + "; ";
  }
  return {ok, detail};
}

Outcome ac5() {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RunManifest man = default_manifest();
  ModelConfig m = man.model;
  m.tau = 0.05;
  SolverSettings s;
  s.tol_lin = 1e-13;
  s.tol_newton = 1e-12;
  const Problem pb(g, m, s);
  const auto& fe = pb.free_edges();
  const auto& fn = pb.free_nodes();

  EdgeField B_prev(g.edge_count(), 0.0);
  for (int e : fe) B_prev[e] = u(rng);
  NodeField xi_prev(g.node_count(), 0.0);
  for (int n : fn) xi_prev[n] = 0.5 * u(rng);

  // Magnetic step against a dense LU solve of the lagged linear system.
  const double t = 0.05;
  const Vector bn = pb.ops().RE * B_prev;
  const NodeField f = pb.f(t);
  NodeField scale(g.node_count());
  for (int n = 0; n < g.node_count(); ++n) {
    const double b2 = bn[3 * n] * bn[3 * n] + bn[3 * n + 1] * bn[3 * n + 1] + bn[3 * n + 2] * bn[3 * n + 2];
    scale[n] = m.R_alpha * f[n] / (1.0 + m.gamma * b2);
  }
  const Eigen::MatrixXd S =
      dense(pb.magnetic_matrix(pb.face_lambda(xi_prev), scale).submatrix(fe, fe));
  Eigen::VectorXd rhs(fe.size());
  for (std::size_t i = 0; i < fe.size(); ++i) rhs[i] = g.edge_mass()[fe[i]] * B_prev[fe[i]] / m.tau;
  const Eigen::VectorXd xB = S.partialPivLu().solve(rhs);
  const MagneticStepResult ms = magnetic_step(pb, B_prev, xi_prev, t);
  double errB = 0.0;
  for (std::size_t i = 0; i < fe.size(); ++i) errB = std::max(errB, std::abs(ms.B[fe[i]] - xB[i]));

  // Heat step against nonlinear Gauss–Seidel with bisection.
  const HeatStepResult hs = heat_step(pb, xi_prev, ms.B, t);
  NodeField hr(g.node_count());
  for (int n = 0; n < g.node_count(); ++n) {
    hr[n] = g.node_mass()[n] * (xi_prev[n] / m.tau + hs.source[n]) - pb.theta0_lift()[n];
  }
  const Vector rr = pb.restrict_nodes(hr);
  const Vector oracle = mheat::oracle::gauss_seidel_oracle(pb.heat_system(), rr);
  double errX = 0.0;
  for (std::size_t i = 0; i < fn.size(); ++i) errX = std::max(errX, std::abs(hs.xi[fn[i]] - oracle[i]));

  // Two Newton initialisations.
  Vector guess(fn.size());
  for (double& x : guess) x = 4.0 * u(rng);
  const SolveResult a = solve_heat_step_newton(pb.heat_system(), rr, Vector(fn.size(), 0.0), 1e-12, 100);
  const SolveResult b = solve_heat_step_newton(pb.heat_system(), rr, guess, 1e-12, 100);
  double errN = 0.0;
  for (std::size_t i = 0; i < fn.size(); ++i) errN = std::max(errN, std::abs(a.x[i] - b.x[i]));

  return {errB <= 1e-8 && errX <= 1e-8 && errN <= 1e-9 && a.report.converged && b.report.converged,
          "magnetic vs LU " + num(errB) + ", heat vs Gauss-Seidel " + num(errX) + ", Newton inits " + num(errN)};
}

Outcome ac6() {
  RunManifest man = default_manifest();
  man.domain.cells = {4, 4, 4};
  const StaggeredGrid g = make_grid(man.domain);
  const double T = man.model.t_final;
  std::vector<double> l6, l7;
  for (int N : {16, 32, 64}) {
    ModelConfig m = man.model;
    m.tau = T / N;
    const RunResult r = tracked_run(Problem(g, m, man.solver));
    l6.push_back(r.diagnostics.back().lemma6_lhs);
    l7.push_back(r.diagnostics.back().lemma7_lhs);
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return std::isfinite(*hi) && *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  const double s6 = spread(l6), s7 = spread(l7);
  return {s6 < 2.0 && s7 < 2.0, "lemma6_lhs " + num(l6[0]) + "/" + num(l6[1]) + "/" + num(l6[2]) + " (max/min " +
                                    num(s6) + "), lemma7_lhs " + num(l7[0]) + "/" + num(l7[1]) + "/" + num(l7[2]) +
                                    " (max/min " + num(s7) + ")"};
}

Outcome ac7() {
  const auto g = build_grid({1, 1, 1}, {4, 4, 4}, {BoxFace::ZMinus});
  ModelConfig m;
  m.tau = 0.02;
  m.t_final = 1.0;
  m.f_preset = Preset::parse("constant value=0");
  m.U_preset = Preset::parse("zero");
  const Problem pb(g, m);
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RunOptions opt;
  opt.B0 = EdgeField(g.edge_count(), 0.0);
  for (int e : pb.free_edges()) (*opt.B0)[e] = u(rng);
  double b = std::sqrt(weighted_sq(g.edge_mass(), *opt.B0));
  double d = std::sqrt(weighted_sq(pb.ops().interior_weight, pb.ops().D * *opt.B0));
  const RunResult r = tracked_run(pb, opt);
  int violations = 0;
  for (const StepDiagnostics& s : r.diagnostics) {
    violations += s.norm_B_L2 > b * (1.0 + 1e-12);
    violations += s.norm_divB_L2 > d * (1.0 + 1e-12);
    b = s.norm_B_L2;
    d = s.norm_divB_L2;
  }
  return {violations == 0 && r.diagnostics.size() == 50,
          std::to_string(r.diagnostics.size()) + " steps, " + std::to_string(violations) + " violations, final |B| " +
              num(b) + ", |div B| " + num(d)};
}

Outcome ac9(EpsSweep& keep) {
  const RunManifest man = default_manifest();
  const StaggeredGrid g = make_grid(man.domain);
  keep = epsilon_sweep(g, man.model, man.solver, {0.1, 0.05, 0.025, 0.0125});
  bool ratios = true;
  std::string detail = "ratios";
  for (std::size_t i = 1; i < keep.rows.size(); ++i) {
    const double q = keep.rows[i].residual_ratio;
    ratios = ratios && q >= 1.6 && q <= 2.4;
    detail += " " + num(q);
  }
  detail += ", solution diffs";
  for (std::size_t i = 0; i + 1 < keep.rows.size(); ++i) detail += " " + num(keep.rows[i].solution_diff);
  return {ratios && keep.residual_decreasing && keep.solution_diff_decreasing, detail};
}

Outcome ac10() {
  const RunManifest man = default_manifest();
  const StaggeredGrid g = make_grid(man.domain);
  const double T = man.model.t_final;
  const TauStudy ts = tau_convergence_study(g, man.model, man.solver, {T / 8, T / 16, T / 32, T / 64});
  std::string detail = "tau diffs";
  for (std::size_t i = 0; i + 1 < ts.rows.size(); ++i) detail += " " + num(ts.rows[i].diff_B);
  const MmsReport mr = mms_verify(man.domain, man.model, man.solver);
  detail += "; mms temporal B " + num(mr.order_t_B) + " xi " + num(mr.order_t_xi) + ", spatial B " +
            num(mr.order_s_B) + " xi " + num(mr.order_s_xi);
  const bool halvings = mr.temporal.size() >= 4 && mr.spatial.size() >= 4;
  return {ts.monotone && mr.pass() && halvings, detail};
}

Outcome ac11() {
  const RunManifest man = default_manifest();
  const StaggeredGrid g = make_grid(man.domain);
  const UniquenessReport r = uniqueness_experiment(g, man.model, man.solver, {1e-3, 5e-4, 2.5e-4}, man.study.seed);
  std::string detail = "C_hat";
  bool bounds = true;
  for (const UniquenessSeries& s : r.series) {
    detail += " " + num(s.C_hat);
    bounds = bounds && s.gronwall_bound_holds;
  }
  detail += " (spread " + num(r.C_hat_spread) + "), ratios";
  for (double q : r.quadratic_ratios) detail += " " + num(q);
  return {r.pass && bounds, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MHEAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome ac12() {
  const fs::path root = fs::temp_directory_path() / "mheat_acceptance_ac12";
  fs::remove_all(root);
  const std::string cfg = std::string(MHEAT_SOURCE_DIR) + "/configs/default.cfg";
  const std::vector<std::string> subs{"run", "verify", "sweep-eps", "converge-tau", "uniq", "mms"};
  bool ok = true;
  int compared = 0;
  std::string detail;
  for (const std::string& sub : subs) {
    int codes[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / (sub + std::to_string(rep));
      codes[rep] = cli(sub + " --config " + cfg + " --seed 7 --out " + out.string());
    }
    ok = ok && codes[0] == 0 && codes[0] == codes[1];
    bool same = true;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / (sub + "0"))) {
      const fs::path other = root / (sub + "1") / entry.path().filename();
      same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
      ++files;
    }
    ok = ok && same && files > 0;
    compared += files;
    detail += sub + (same ? " same" : " DIFFERENT") + "(exit " + std::to_string(codes[0]) + ") ";
  }
  fs::remove_all(root);
  return {ok, detail + "; " + std::to_string(compared) + " files compared"};
}

}  // namespace

int main() {
  EpsSweep sweep;
  const std::vector<Criterion> criteria{
      {"AC1", 5.0, ac1},
      {"AC2", 10.0, ac2},
      {"AC3", 10.0, ac3},
      {"AC4", 30.0, ac4},
      {"AC5", 60.0, ac5},
      {"AC6", 60.0, ac6},
      {"AC7", 60.0, ac7},
      {"AC9", 300.0, [&] { return ac9(sweep); }},
      {"AC8", 60.0,
       [&] {
         // A strong field drives the cut-off into saturation.
         const auto g = build_grid({1, 1, 1}, {4, 4, 4}, {BoxFace::ZMinus});
         ModelConfig m = default_manifest().model;
         m.B0_preset = Preset::parse("divfree_vortex amplitude=50");
         m.t_final = 0.125;
         const RunResult r = tracked_run(Problem(g, m));
         for (const EpsRow& row : sweep.rows) {
           g_worst_source_excess = std::max(g_worst_source_excess, row.max_source - m.q_max() / row.epsilon);
           ++g_runs_checked;
         }
         return Outcome{g_worst_source_excess <= 1e-12,
                        std::to_string(g_runs_checked) + " runs, worst max|q[K]_eps| - q_max/eps " +
                            num(g_worst_source_excess) + ", saturated run " + num(r.max_source) + " of " +
                            num(m.q_max() / m.epsilon)};
       }},
      {"AC10", 300.0, ac10},
      {"AC11", 180.0, ac11},
      {"AC12", 600.0, ac12},
  };

  int failures = 0;
  std::vector<std::string> lines(12);
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_seconds;
    failures += !pass;
    std::string line = std::string(c.id) + (pass ? " PASS " : " FAIL ") + o.detail + " [" + num(secs) + " s, budget " +
                       num(c.budget_seconds) + " s]";
    lines[std::stoi(c.id + 2) - 1] = line;
  }
  for (const std::string& l : lines) std::cout << l << '\n';
  std::cout << (failures ? "ACCEPTANCE FAIL " : "ACCEPTANCE PASS ") << failures << " failing criteria\n";
  return failures ? 1 : 0;
}
