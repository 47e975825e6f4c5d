#include "mheat/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mheat/operators.hpp"
#include "mheat/presets.hpp"
#include "mheat/rng.hpp"

namespace mheat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RunResult checked_run(const Problem& pb, const RunOptions& opt) {
  RunResult r = run(pb, opt);
  if (!r.ok()) throw Error(r.error_kind, "rothe", "study run failed: " + *r.error);
  return r;
}

double sq_diff(const StaggeredGrid& g, InnerKind kind, const Vector& a, const Vector& b) {
  Vector d = a;
  axpy(-1.0, b, d);
  return inner(g, kind, d, d);
}

bool divides(double T, double tau) {
  const double n = T / tau;
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n);
}

}  // namespace

SpaceTimeDiff space_time_difference(const StaggeredGrid& grid, const RunResult& a, const RunResult& b) {
  if (a.B_states.empty() || b.B_states.empty()) {
    throw Error(ErrorKind::Run, "rothe", "space_time_difference needs runs with kept states");
  }
  const double T = std::min(a.config.tau * (a.B_states.size() - 1), b.config.tau * (b.B_states.size() - 1));
  const double dt = std::min(a.config.tau, b.config.tau);
  const int K = static_cast<int>(std::lround(T / dt));
  SpaceTimeDiff out;
  for (int k = 0; k <= K; ++k) {
    const double t = std::min(k * dt, T);
    const double w = (k == 0 || k == K) ? 0.5 * dt : dt;
    const auto [Ba, xa] = interpolant_eval(a, Interpolant::PiecewiseLinear, t);
    const auto [Bb, xb] = interpolant_eval(b, Interpolant::PiecewiseLinear, t);
    out.B += w * sq_diff(grid, InnerKind::Edge, Ba, Bb);
    out.xi += w * sq_diff(grid, InnerKind::Node, xa, xb);
  }
  out.B = std::sqrt(out.B);
  out.xi = std::sqrt(out.xi);
  return out;
}

TauStudy tau_convergence_study(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                               const std::vector<double>& tau_list) {
  if (tau_list.size() < 3) throw config_error("tau_list: needs at least 3 levels");
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    if (!(tau_list[i] > 0.0) || !divides(model.t_final, tau_list[i])) {
      throw config_error("tau_list: every step must be > 0 and divide t_final");
    }
    if (i > 0 && std::abs(tau_list[i] - 0.5 * tau_list[i - 1]) > 1e-12 * tau_list[i - 1]) {
      throw config_error("tau_list: not a nested halving sequence");
    }
  }

  std::vector<RunResult> runs;
  for (double tau : tau_list) {
    ModelConfig m = model;
    m.tau = tau;
    Problem pb(grid, m, solver);
    RunOptions opt;
    opt.keep_states = true;
    runs.push_back(checked_run(pb, opt));
  }

  TauStudy st;
  const std::size_t L = runs.size();
  st.rows.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    TauStudyRow& row = st.rows[i];
    row.tau = tau_list[i];
    row.diff_B = row.diff_xi = row.order_B = row.order_xi = kNaN;
    if (i + 1 < L) {
      const SpaceTimeDiff d = space_time_difference(grid, runs[i], runs[i + 1]);
      row.diff_B = d.B;
      row.diff_xi = d.xi;
    }
    // Exact on each step: ∫(1−Lₙ)² dt = τ/3.
    double gap = 0.0;
    for (std::size_t n = 1; n < runs[i].B_states.size(); ++n) {
      gap += row.tau / 3.0 * sq_diff(grid, InnerKind::Edge, runs[i].B_states[n], runs[i].B_states[n - 1]);
    }
    row.interp_gap_B = std::sqrt(gap);
  }
  st.monotone = true;
  for (std::size_t i = 1; i + 1 < L; ++i) {
    const TauStudyRow& prev = st.rows[i - 1];
    TauStudyRow& row = st.rows[i];
    if (prev.diff_B > 0.0 && row.diff_B > 0.0) row.order_B = std::log2(prev.diff_B / row.diff_B);
    if (prev.diff_xi > 0.0 && row.diff_xi > 0.0) row.order_xi = std::log2(prev.diff_xi / row.diff_xi);
    const double total_prev = std::hypot(prev.diff_B, prev.diff_xi);
    const double total = std::hypot(row.diff_B, row.diff_xi);
    if (!(total < total_prev || (total == 0.0 && total_prev == 0.0))) st.monotone = false;
  }
  return st;
}

EpsSweep epsilon_sweep(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                       const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) throw config_error("eps_list: needs at least 3 levels");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw config_error("eps_list: every epsilon must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw config_error("eps_list: must be strictly decreasing");
  }

  std::vector<RunResult> runs;
  for (double eps : eps_list) {
    ModelConfig m = model;
    m.epsilon = eps;
    Problem pb(grid, m, solver);
    RunOptions opt;
    opt.keep_states = true;
    runs.push_back(checked_run(pb, opt));
  }

  EpsSweep sw;
  const std::size_t L = runs.size();
  sw.rows.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    EpsRow& row = sw.rows[i];
    const RunResult& r = runs[i];
    row.epsilon = eps_list[i];
    row.cutoff_residual_L1 = r.cutoff_residual_L1;
    row.cutoff_bound_L1 = r.cutoff_bound_L1;
    row.lemma7_lhs = r.diagnostics.empty() ? 0.0 : r.diagnostics.back().lemma7_lhs;
    row.max_source = r.max_source;
    row.residual_ratio = kNaN;
    row.solution_diff = kNaN;
    if (i > 0 && row.cutoff_residual_L1 > 0.0) {
      row.residual_ratio = sw.rows[i - 1].cutoff_residual_L1 / row.cutoff_residual_L1;
    }
    if (i + 1 < L) {
      const SpaceTimeDiff d = space_time_difference(grid, runs[i], runs[i + 1]);
      row.solution_diff = std::hypot(d.B, d.xi);
    }
  }
  sw.residual_decreasing = true;
  sw.solution_diff_decreasing = true;
  for (std::size_t i = 1; i < L; ++i) {
    if (!(sw.rows[i].cutoff_residual_L1 < sw.rows[i - 1].cutoff_residual_L1)) sw.residual_decreasing = false;
    if (i + 1 < L && !(sw.rows[i].solution_diff < sw.rows[i - 1].solution_diff)) sw.solution_diff_decreasing = false;
  }
  return sw;
}

UniquenessReport uniqueness_experiment(const StaggeredGrid& grid, const ModelConfig& model,
                                       const SolverSettings& solver, const std::vector<double>& delta_list,
                                       std::uint64_t seed) {
  if (delta_list.empty()) throw config_error("delta_list: must not be empty");
  for (double d : delta_list) {
    if (!(d >= 0.0)) throw config_error("delta_list: every delta must be >= 0");
  }

  Problem pb(grid, model, solver);
  const EdgeField B0 = sample_B0(grid, model.B0_preset, model.magnetic_bc);

  auto rng = make_stream(seed, "uniqueness", 0);
  EdgeField P(grid.edge_count(), 0.0);
  for (int e : pb.free_edges()) P[e] = uniform(rng, -1.0, 1.0);
  const double pn = std::sqrt(inner(grid, InnerKind::Edge, P, P));
  for (double& v : P) v /= pn;

  RunOptions base_opt;
  base_opt.keep_states = true;
  base_opt.B0 = B0;
  const RunResult base = checked_run(pb, base_opt);
  const double tau = model.tau;

  UniquenessReport rep;
  for (double delta : delta_list) {
    RunOptions opt = base_opt;
    EdgeField Bp = B0;
    axpy(delta, P, Bp);
    opt.B0 = Bp;
    const RunResult r = checked_run(pb, opt);

    UniquenessSeries s;
    s.delta = delta;
    for (std::size_t n = 0; n < r.B_states.size(); ++n) {
      s.t.push_back(n * tau);
      const double eB = sq_diff(grid, InnerKind::Edge, r.B_states[n], base.B_states[n]);
      NodeField dxi = r.xi_states[n];
      axpy(-1.0, base.xi_states[n], dxi);
      s.E.push_back(eB + inner(grid, InnerKind::Node, dxi, dxi));
      if (n > 0) {
        double l4 = 0.0;
        for (int i = 0; i < grid.node_count(); ++i) l4 += grid.node_mass()[i] * std::pow(dxi[i], 4);
        l4 = std::pow(l4, 0.25);
        const double l2 = std::sqrt(inner(grid, InnerKind::Node, dxi, dxi));
        const double h1 = norm_H1(pb, dxi);
        if (l2 > 0.0 && h1 > 0.0) {
          s.sobolev_ratio_max = std::max(s.sobolev_ratio_max, l4 / (std::pow(l2, 0.25) * std::pow(h1, 0.75)));
        }
      }
    }
    const double E0 = s.E.front();
    if (E0 > 0.0) {
      s.C_hat = -std::numeric_limits<double>::infinity();
      for (std::size_t n = 1; n < s.E.size(); ++n) {
        if (s.E[n] <= 0.0) continue;
        s.C_hat = std::max(s.C_hat, (std::log(s.E[n]) - std::log(E0)) / s.t[n]);
      }
      if (!std::isfinite(s.C_hat)) s.C_hat = 0.0;
      for (std::size_t n = 0; n < s.E.size(); ++n) {
        if (s.E[n] > E0 * std::exp(s.C_hat * s.t[n]) * (1.0 + 1e-12)) s.gronwall_bound_holds = false;
      }
    } else {
      for (double e : s.E) {
        if (e != 0.0) s.gronwall_bound_holds = false;
      }
    }
    rep.series.push_back(std::move(s));
  }

  rep.ratios_ok = true;
  for (std::size_t i = 0; i + 1 < rep.series.size(); ++i) {
    const double a = rep.series[i].E.back();
    const double b = rep.series[i + 1].E.back();
    const double ratio = b > 0.0 ? a / b : kNaN;
    rep.quadratic_ratios.push_back(ratio);
    if (!(ratio >= 3.6 && ratio <= 4.4)) rep.ratios_ok = false;
  }

  std::vector<double> c;
  for (const auto& s : rep.series) c.push_back(s.C_hat);
  std::sort(c.begin(), c.end());
  const double median = c.size() % 2 ? c[c.size() / 2] : 0.5 * (c[c.size() / 2 - 1] + c[c.size() / 2]);
  for (double v : c) {
    const double spread = median != 0.0 ? std::abs(v - median) / std::abs(median) : std::abs(v);
    rep.C_hat_spread = std::max(rep.C_hat_spread, spread);
  }
  rep.C_hat_stable = rep.C_hat_spread <= 0.25;
  bool bounds = true;
  for (const auto& s : rep.series) bounds = bounds && s.gronwall_bound_holds;
  rep.pass = bounds && rep.C_hat_stable && rep.ratios_ok;
  return rep;
}

}  // namespace mheat
