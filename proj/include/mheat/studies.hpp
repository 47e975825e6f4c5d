#pragma once

#include <cstdint>
#include <vector>

#include "mheat/rothe.hpp"

namespace mheat {

// Space-time L²(Q_T) distance of two kept-state runs, both evaluated through
// their piecewise-linear interpolants on the finer of the two time grids
// (trapezoidal rule in time).
struct SpaceTimeDiff {
  double B = 0.0;
  double xi = 0.0;
};
SpaceTimeDiff space_time_difference(const StaggeredGrid& grid, const RunResult& a, const RunResult& b);

struct TauStudyRow {
  double tau = 0.0;
  double diff_B = 0.0;    // ‖B_τ − B_{τ/2}‖ (NaN on the last level)
  double diff_xi = 0.0;
  double order_B = 0.0;   // log₂ of successive difference ratios (NaN where undefined)
  double order_xi = 0.0;
  double interp_gap_B = 0.0;  // ‖B_τ − B̃_τ‖_{L²(Q_T)}
};

struct TauStudy {
  std::vector<TauStudyRow> rows;
  bool monotone = false;  // successive differences strictly decrease
};

// tau_list must be a halving sequence of at least 3 step sizes dividing t_final.
TauStudy tau_convergence_study(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                               const std::vector<double>& tau_list);

struct EpsRow {
  double epsilon = 0.0;
  double cutoff_residual_L1 = 0.0;
  double cutoff_bound_L1 = 0.0;
  double residual_ratio = 0.0;  // residual(previous ε) / residual(ε), NaN on the first level
  double solution_diff = 0.0;   // ‖(B_ε,ξ_ε) − (B_next,ξ_next)‖, NaN on the last level
  double lemma7_lhs = 0.0;
  double max_source = 0.0;
};

struct EpsSweep {
  std::vector<EpsRow> rows;
  bool residual_decreasing = false;
  bool solution_diff_decreasing = false;
};

EpsSweep epsilon_sweep(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                       const std::vector<double>& eps_list);

struct UniquenessSeries {
  double delta = 0.0;
  std::vector<double> t;
  std::vector<double> E;
  double C_hat = 0.0;
  bool gronwall_bound_holds = true;
  double sobolev_ratio_max = 0.0;  // ‖Δξ‖_{L⁴} / (‖Δξ‖₀^{1/4} ‖Δξ‖₁^{3/4})
};

struct UniquenessReport {
  std::vector<UniquenessSeries> series;
  std::vector<double> quadratic_ratios;  // E_δ(T)/E_{δ/2}(T) for consecutive entries
  double C_hat_spread = 0.0;             // max |Ĉ − Ĉ_median| / |Ĉ_median|
  bool C_hat_stable = false;             // spread ≤ 0.25
  bool ratios_ok = false;                // all ratios in [3.6, 4.4]
  bool pass = false;
};

// Twin runs from B₀ and B₀ + δ·P with P a seeded unit-norm perturbation that
// respects the boundary condition.
UniquenessReport uniqueness_experiment(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                                       const std::vector<double>& delta_list, std::uint64_t seed);

}  // namespace mheat
