#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mheat/config.hpp"
#include "mheat/discrete_ops.hpp"
#include "mheat/error.hpp"
#include "mheat/grid.hpp"
#include "mheat/solver.hpp"

namespace mheat {

// Grid, parameters and every time-independent discrete object of one run.
class Problem {
 public:
  Problem(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver = {});

  const StaggeredGrid& grid() const { return grid_; }
  const ModelConfig& model() const { return model_; }
  const SolverSettings& solver() const { return solver_; }
  const MimeticOperators& ops() const { return ops_; }

  const NodeField& theta0() const { return theta0_; }
  const std::vector<Vec3>& U() const { return U_; }
  NodeField f(double t) const;
  // Evaluate f at a fixed time regardless of the step time (stationary studies).
  void freeze_data_time(double t0) { frozen_time_ = t0; }
  // sup over nodes of |f| at t = 0, which bounds |f| for all t for every preset.
  double f_sup() const { return f_sup_; }
  double U_sup() const { return U_sup_; }

  // Edges carrying unknowns (all edges under the natural condition) and non-Γ₁ nodes.
  const std::vector<int>& free_edges() const { return free_edges_; }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  EdgeField expand_edges(const Vector& reduced) const;
  NodeField expand_nodes(const Vector& reduced) const;
  Vector restrict_edges(const EdgeField& full) const;
  Vector restrict_nodes(const NodeField& full) const;

  // λ(ξ+θ₀) on faces from the mean over the four corner nodes.
  Vector face_lambda(const NodeField& xi) const;

  // Full edge x edge matrix of the linear magnetic step:
  //   M_E/τ + Cᵀ diag(M_F λ) C + Λ grad_div − (R_F C)ᵀ diag(V)[s I + [U]×] R_E.
  SparseMatrix magnetic_matrix(const Vector& lambda_face, const NodeField& quench_scale) const;
  // Coupling block alone, without the minus sign.
  SparseMatrix coupling_matrix(const NodeField& quench_scale) const;

  // Heat linear part M_N/τ + κ Gᵀ M_E G on free nodes, with Γ₂ data.
  const HeatSystem& heat_system() const { return heat_; }
  // κ Gᵀ M_E G θ₀ on all nodes.
  const NodeField& theta0_lift() const { return theta0_lift_; }

 private:
  StaggeredGrid grid_;
  ModelConfig model_;
  SolverSettings solver_;
  MimeticOperators ops_;
  NodeField theta0_;
  std::vector<Vec3> U_;
  std::optional<double> frozen_time_;
  double f_sup_ = 0.0;
  double U_sup_ = 0.0;
  std::vector<int> free_edges_;
  std::vector<int> free_nodes_;
  std::vector<std::array<int, 4>> face_corners_;
  HeatSystem heat_;
  NodeField theta0_lift_;
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double norm_B_L2 = 0.0;
  double norm_curlB_L2 = 0.0;
  double norm_divB_L2 = 0.0;
  double lemma6_lhs = 0.0;
  double norm_xi_L2 = 0.0;
  double norm_xi_L1 = 0.0;
  double norm_grad_xi_L2 = 0.0;
  double norm_xi_L4_G2 = 0.0;
  double norm_xi_L5_G2 = 0.0;
  double lemma7_lhs = 0.0;
  double weighted_grad = 0.0;
  double lq_1 = 0.0;
  double lq_1p1 = 0.0;
  double lq_1p2 = 0.0;
  double joule_total = 0.0;
  int lin_iters = 0;
  int newton_iters = 0;
};

struct Snapshot {
  double t = 0.0;
  EdgeField B;
  NodeField xi;
};

// Manufactured sources in functional form (already tested against the basis).
struct Forcing {
  std::function<EdgeField(double t)> magnetic;
  std::function<NodeField(double t)> heat;
  // Γ₂ boundary functional added to the heat right-hand side.
  std::function<NodeField(double t)> heat_boundary;
};

struct RunOptions {
  std::optional<EdgeField> B0;
  std::optional<NodeField> xi0;
  const Forcing* forcing = nullptr;
  bool keep_states = false;
  std::vector<double> snapshot_times;
};

struct RunResult {
  ModelConfig config;
  std::vector<StepDiagnostics> diagnostics;
  EdgeField B_final;
  NodeField xi_final;
  std::vector<Snapshot> snapshots;
  // Bⁿ, ξⁿ for n = 0..N when keep_states is set.
  std::vector<EdgeField> B_states;
  std::vector<NodeField> xi_states;
  std::vector<double> weighted_grad_alt;  // denominator 1+|ξ|^{3/2}
  std::vector<std::string> warnings;
  bool truncated = false;
  bool step_condition_ok = true;
  double max_source = 0.0;          // max |q[K]_ε| (or q[K]_ε) over nodes and steps
  double cutoff_residual_L1 = 0.0;  // Σₙ τ ‖qK − [qK]_ε‖_{L¹}
  double cutoff_bound_L1 = 0.0;     // Σₙ τ ε ‖(qK)²‖_{L¹}
  double wall_seconds = 0.0;
  std::optional<std::string> error;
  ErrorKind error_kind = ErrorKind::Run;

  bool ok() const { return !error.has_value(); }
};

struct MagneticStepResult {
  EdgeField B;
  SolveReport report;
};

struct HeatStepResult {
  NodeField xi;
  SolveReport report;
  NodeField K;       // Joule density of Bⁿ
  NodeField source;  // regularised source actually used
  NodeField uncut;   // q(ξⁿ⁻¹) K(Bⁿ)
};

MagneticStepResult magnetic_step(const Problem& pb, const EdgeField& B_prev, const NodeField& xi_prev, double t_n,
                                 const EdgeField* forcing = nullptr);
HeatStepResult heat_step(const Problem& pb, const NodeField& xi_prev, const EdgeField& B_new, double t_n,
                         const NodeField* forcing = nullptr);

// Step condition τ < λ₀/(R_α‖f‖ + ‖U‖)² for the energy estimate.
bool lemma6_step_condition(const Problem& pb);

RunResult run(const Problem& pb, const RunOptions& options = {});

enum class Interpolant { PiecewiseLinear, PiecewiseConstant, LaggedConstant };

std::pair<EdgeField, NodeField> interpolant_eval(const RunResult& result, Interpolant which, double t);

}  // namespace mheat
