#pragma once

#include <vector>

#include "mheat/config.hpp"
#include "mheat/rothe.hpp"

namespace mheat {

// Manufactured preset "sine_product" with parameters
//   b_amplitude (0.5), xi_amplitude (0.5), phase (0), xi_offset (0).
// B* = b·(sin πy sin πz, sin πx sin πz, sin πx sin πy) in box-relative
// coordinates, divergence free with vanishing tangential trace; ξ* is a
// product of per-axis factors vanishing on the Γ₁ faces. A nonzero phase or
// offset breaks the boundary conditions and is rejected.
struct MmsOptions {
  Preset manufactured{"sine_product", {}};
  int temporal_cells = 8;
  double temporal_T = 0.5;
  std::vector<int> temporal_steps{8, 16, 32, 64};
  std::vector<int> spatial_cells{4, 8, 16, 32};
  double spatial_tau = 1e3;
  int spatial_max_iters = 200;
  double steady_tol = 1e-8;
};

struct MmsLevel {
  double size = 0.0;  // τ for the temporal table, h_x for the spatial one
  double err_B = 0.0;
  double err_xi = 0.0;
  int iterations = 0;  // fixed-point sweeps (spatial) or steps (temporal)
};

struct MmsReport {
  std::vector<MmsLevel> temporal;
  std::vector<MmsLevel> spatial;
  double order_t_B = 0.0, order_t_xi = 0.0;
  double order_s_B = 0.0, order_s_xi = 0.0;
  bool temporal_ok = false;  // both temporal orders in [0.85, 1.15]
  bool spatial_ok = false;   // both spatial orders in [1.75, 2.25]
  bool pass() const { return temporal_ok && spatial_ok; }
};

// Throws config_error when the manufactured fields violate the boundary
// conditions of `grid` or the magnetic condition is not essential.
void check_manufactured(const StaggeredGrid& grid, const ModelConfig& model, const Preset& manufactured);

// Semi-discrete consistent forcing for B_h(t) = a(t)·I B*, ξ_h(t) = b(t)·I ξ*.
// With a, b constant the discrete scheme reproduces the state to solver tolerance.
struct DiscreteTrajectory {
  double (*a)(double) = nullptr;
  double (*a_dot)(double) = nullptr;
  double (*b)(double) = nullptr;
  double (*b_dot)(double) = nullptr;
};
DiscreteTrajectory decaying_trajectory();    // a = e^{−t}, b = 1 − e^{−2t}
DiscreteTrajectory stationary_trajectory();  // a = b = 1

struct TrajectoryError {
  double err_B = 0.0;
  double err_xi = 0.0;
  int steps = 0;
};
// Runs the scheme with the consistent forcing from B_h(0), ξ_h(0) and returns
// the final-time L² errors.
TrajectoryError run_discrete_trajectory(const StaggeredGrid& grid, const ModelConfig& model,
                                        const SolverSettings& solver, const Preset& manufactured,
                                        const DiscreteTrajectory& traj);

// Stationary solve with the continuous forcing; errors against the interpolated exact fields.
MmsLevel stationary_error(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                          const MmsOptions& options);

double fitted_order(const std::vector<double>& sizes, const std::vector<double>& errors);

MmsReport mms_verify(const GridSpec& domain, const ModelConfig& model, const SolverSettings& solver,
                     const MmsOptions& options = {});

}  // namespace mheat
