#include "mheat/rothe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mheat/error.hpp"
#include "mheat/physics.hpp"
#include "mheat/presets.hpp"

namespace mheat {

namespace {

Error step_error(const std::string& what) { return {ErrorKind::Run, "rothe", what}; }

double weighted_sq(const Vector& w, const Vector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return s;
}

}  // namespace

Problem::Problem(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver)
    : grid_(grid), model_(model), solver_(solver), ops_(grid) {
  validate_model(model);
  theta0_ = sample_theta0(grid, model.theta0_preset);
  U_ = sample_U(grid, model.U_preset);
  for (double v : sample_f(grid, model.f_preset, 0.0)) f_sup_ = std::max(f_sup_, std::abs(v));
  for (const Vec3& u : U_) U_sup_ = std::max(U_sup_, norm(u));

  const auto& mask = grid.tangential_boundary_edge_mask();
  for (int e = 0; e < grid.edge_count(); ++e) {
    if (model.magnetic_bc == MagneticBc::Natural || !mask[e]) free_edges_.push_back(e);
  }
  const auto& cls = grid.node_boundary_class();
  for (int n = 0; n < grid.node_count(); ++n) {
    if (cls[n] != NodeClass::Gamma1) free_nodes_.push_back(n);
  }

  face_corners_.resize(grid.face_count());
  for (int f = 0; f < grid.face_count(); ++f) {
    const Coord2 p = grid.coord2(EntityKind::Face, f);
    const int d = grid.entity(EntityKind::Face, f).dir;
    const int a = (d + 1) % 3;
    const int b = (d + 2) % 3;
    int c = 0;
    for (int sa : {-1, 1}) {
      for (int sb : {-1, 1}) {
        Coord2 q = p;
        q[a] += sa;
        q[b] += sb;
        face_corners_[f][c++] = grid.index_at(EntityKind::Node, q);
      }
    }
  }

  Vector mass_tau = grid.node_mass();
  for (double& m : mass_tau) m /= model.tau;
  const SparseMatrix full = SparseMatrix::diagonal_matrix(mass_tau) + ops_.laplacian.scaled(model.kappa);
  heat_.A = full.submatrix(free_nodes_, free_nodes_);
  heat_.surface_weight = restrict_nodes(grid.gamma2_weights());
  heat_.theta0 = restrict_nodes(theta0_);
  heat_.mass = restrict_nodes(grid.node_mass());
  heat_.zeta = model.zeta;
  heat_.omega = model.omega;
  theta0_lift_ = ops_.laplacian * theta0_;
  for (double& v : theta0_lift_) v *= model.kappa;
}

NodeField Problem::f(double t) const { return sample_f(grid_, model_.f_preset, frozen_time_.value_or(t)); }

EdgeField Problem::expand_edges(const Vector& reduced) const {
  EdgeField out(grid_.edge_count(), 0.0);
  for (std::size_t i = 0; i < free_edges_.size(); ++i) out[free_edges_[i]] = reduced[i];
  return out;
}

NodeField Problem::expand_nodes(const Vector& reduced) const {
  NodeField out(grid_.node_count(), 0.0);
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) out[free_nodes_[i]] = reduced[i];
  return out;
}

Vector Problem::restrict_edges(const EdgeField& full) const {
  Vector out(free_edges_.size());
  for (std::size_t i = 0; i < free_edges_.size(); ++i) out[i] = full[free_edges_[i]];
  return out;
}

Vector Problem::restrict_nodes(const NodeField& full) const {
  Vector out(free_nodes_.size());
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) out[i] = full[free_nodes_[i]];
  return out;
}

Vector Problem::face_lambda(const NodeField& xi) const {
  Vector lam(grid_.face_count());
  for (int f = 0; f < grid_.face_count(); ++f) {
    double s = 0.0;
    for (int n : face_corners_[f]) s += xi[n] + theta0_[n];
    lam[f] = lambda_of(0.25 * s, model_.lambda0, model_.lambda1);
  }
  return lam;
}

SparseMatrix Problem::coupling_matrix(const NodeField& quench_scale) const {
  const SparseMatrix& RE = ops_.RE;
  const auto& rp = RE.row_ptr();
  const auto& ci = RE.col_index();
  const auto& va = RE.values();
  const auto& V = grid_.node_mass();
  std::vector<Triplet> t;
  t.reserve(RE.nonzeros() * 3);
  for (int n = 0; n < grid_.node_count(); ++n) {
    const double s = quench_scale[n];
    const Vec3& u = U_[n];
    // s I + [U]×, where [U]× B = U × B.
    const double M[3][3] = {{s, -u[2], u[1]}, {u[2], s, -u[0]}, {-u[1], u[0], s}};
    for (int c = 0; c < 3; ++c) {
      for (int cp = 0; cp < 3; ++cp) {
        const double coef = V[n] * M[c][cp];
        if (coef == 0.0) continue;
        const int row = 3 * n + cp;
        for (int p = rp[row]; p < rp[row + 1]; ++p) t.push_back({3 * n + c, ci[p], coef * va[p]});
      }
    }
  }
  const SparseMatrix Q(RE.rows(), RE.cols(), t);
  return ops_.RFCt * Q;
}

SparseMatrix Problem::magnetic_matrix(const Vector& lambda_face, const NodeField& quench_scale) const {
  Vector w = grid_.face_mass();
  for (int f = 0; f < grid_.face_count(); ++f) w[f] *= lambda_face[f];
  Vector mt = grid_.edge_mass();
  for (double& m : mt) m /= model_.tau;
  SparseMatrix S = SparseMatrix::diagonal_matrix(mt) + weighted_gram(ops_.C, w);
  if (model_.Lambda != 0.0) S = S + ops_.grad_div.scaled(model_.Lambda);
  bool coupled = false;
  for (double s : quench_scale) coupled = coupled || s != 0.0;
  for (const Vec3& u : U_) coupled = coupled || !(u == Vec3{0.0, 0.0, 0.0});
  if (coupled) S = S - coupling_matrix(quench_scale);
  return S;
}

MagneticStepResult magnetic_step(const Problem& pb, const EdgeField& B_prev, const NodeField& xi_prev, double t_n,
                                 const EdgeField* forcing) {
  const StaggeredGrid& g = pb.grid();
  const ModelConfig& c = pb.model();
  if (static_cast<int>(B_prev.size()) != g.edge_count() || static_cast<int>(xi_prev.size()) != g.node_count()) {
    throw step_error("magnetic_step: field size mismatch");
  }
  const Vector bn = pb.ops().RE * B_prev;
  const NodeField f = pb.f(t_n);
  NodeField scale(g.node_count());
  bool coupled = pb.U_sup() > 0.0;
  for (int n = 0; n < g.node_count(); ++n) {
    const double b2 = bn[3 * n] * bn[3 * n] + bn[3 * n + 1] * bn[3 * n + 1] + bn[3 * n + 2] * bn[3 * n + 2];
    scale[n] = c.R_alpha * f[n] / (1.0 + c.gamma * b2);
    coupled = coupled || scale[n] != 0.0;
  }
  const SparseMatrix S = pb.magnetic_matrix(pb.face_lambda(xi_prev), scale);
  EdgeField rhs(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) rhs[e] = g.edge_mass()[e] * B_prev[e] / c.tau;
  if (forcing) axpy(1.0, *forcing, rhs);

  const auto& fe = pb.free_edges();
  const SparseMatrix Sr = S.submatrix(fe, fe);
  const Vector br = pb.restrict_edges(rhs);
  const Vector x0 = pb.restrict_edges(B_prev);
  const SolveResult sol = coupled ? solve_nonsymmetric(Sr, br, pb.solver().tol_lin, pb.solver().max_iter, &x0)
                                  : solve_spd(Sr, br, pb.solver().tol_lin, pb.solver().max_iter, &x0);
  if (!sol.report.converged) {
    throw Error(ErrorKind::Solver, "rothe",
                "magnetic step at t=" + std::to_string(t_n) + " did not converge (" + sol.report.method + ", " +
                    std::to_string(sol.report.iterations) + " iterations, residual " +
                    std::to_string(sol.report.final_residual) + ")");
  }
  return {pb.expand_edges(sol.x), sol.report};
}

HeatStepResult heat_step(const Problem& pb, const NodeField& xi_prev, const EdgeField& B_new, double t_n,
                         const NodeField* forcing) {
  const StaggeredGrid& g = pb.grid();
  const ModelConfig& c = pb.model();
  if (static_cast<int>(B_new.size()) != g.edge_count() || static_cast<int>(xi_prev.size()) != g.node_count()) {
    throw step_error("heat_step: field size mismatch");
  }
  HeatStepResult out;
  out.K = joule_density(pb.ops(), c, B_new, pb.U(), pb.f(t_n));
  out.source.resize(g.node_count());
  out.uncut.resize(g.node_count());
  for (int n = 0; n < g.node_count(); ++n) {
    const double q = q_of(xi_prev[n], c.q0, c.q1);
    out.uncut[n] = q * out.K[n];
    out.source[n] = c.cutoff_mode == CutoffMode::Product ? cutoff(q * out.K[n], c.epsilon)
                                                         : q * cutoff(out.K[n], c.epsilon);
  }
  NodeField rhs(g.node_count());
  const auto& m = g.node_mass();
  for (int n = 0; n < g.node_count(); ++n) {
    rhs[n] = m[n] * xi_prev[n] / c.tau + m[n] * out.source[n] - pb.theta0_lift()[n];
  }
  if (forcing) axpy(1.0, *forcing, rhs);
  const SolveResult sol = solve_heat_step_newton(pb.heat_system(), pb.restrict_nodes(rhs), pb.restrict_nodes(xi_prev),
                                                 pb.solver().tol_newton, 100);
  if (!sol.report.converged) {
    throw Error(ErrorKind::Solver, "rothe",
                "heat step at t=" + std::to_string(t_n) + ": Newton did not converge (merit " +
                    std::to_string(sol.report.final_residual) + ")");
  }
  out.xi = pb.expand_nodes(sol.x);
  out.report = sol.report;
  return out;
}

bool lemma6_step_condition(const Problem& pb) {
  const double c = pb.model().R_alpha * pb.f_sup() + pb.U_sup();
  return c == 0.0 || pb.model().tau < pb.model().lambda0 / (c * c);
}

namespace {

struct DiagnosticState {
  double curl_sum = 0.0;
  double div_sum = 0.0;
  double grad_sum = 0.0;
  double l5_sum = 0.0;
};

StepDiagnostics diagnose(const Problem& pb, int step, const EdgeField& B, const NodeField& xi, const NodeField& K,
                         DiagnosticState& st, double* weighted_alt) {
  const StaggeredGrid& g = pb.grid();
  const ModelConfig& c = pb.model();
  const MimeticOperators& ops = pb.ops();
  StepDiagnostics d;
  d.step = step;
  d.t = step * c.tau;

  const double b2 = weighted_sq(g.edge_mass(), B);
  const double c2 = weighted_sq(g.face_mass(), ops.C * B);
  const double d2 = weighted_sq(ops.interior_weight, ops.D * B);
  d.norm_B_L2 = std::sqrt(b2);
  d.norm_curlB_L2 = std::sqrt(c2);
  d.norm_divB_L2 = std::sqrt(d2);
  if (step > 0) {
    st.curl_sum += c.tau * c.lambda0 * c2;
    st.div_sum += c.tau * c.Lambda * d2;
  }
  d.lemma6_lhs = b2 + st.curl_sum + st.div_sum;

  const auto& m = g.node_mass();
  const auto& w = g.gamma2_weights();
  const EdgeField gx = ops.G * xi;
  double x2 = 0.0, x1 = 0.0, l4 = 0.0, l5 = 0.0;
  for (int n = 0; n < g.node_count(); ++n) {
    const double a = std::abs(xi[n]);
    x2 += m[n] * a * a;
    x1 += m[n] * a;
    l4 += w[n] * a * a * a * a;
    l5 += w[n] * a * a * a * a * a;
  }
  const double g2 = weighted_sq(g.edge_mass(), gx);
  d.norm_xi_L2 = std::sqrt(x2);
  d.norm_xi_L1 = x1;
  d.norm_grad_xi_L2 = std::sqrt(g2);
  d.norm_xi_L4_G2 = std::pow(l4, 0.25);
  d.norm_xi_L5_G2 = std::pow(l5, 0.2);
  if (step > 0) {
    st.grad_sum += c.tau * c.kappa * c.kappa * g2;
    st.l5_sum += c.zeta * c.tau / 8.0 * l5;
  }
  d.lemma7_lhs = x2 + st.grad_sum + st.l5_sum;

  double wg = 0.0, wg_alt = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& row = ops.G.col_index();
    const int p = ops.G.row_ptr()[e];
    const double mean = 0.5 * (std::abs(xi[row[p]] + xi[row[p + 1]]));
    const double num = c.kappa * gx[e] * gx[e] * g.edge_mass()[e];
    wg += num / std::pow(1.0 + mean, 1.5);
    wg_alt += num / (1.0 + std::pow(mean, 1.5));
  }
  d.weighted_grad = wg;
  if (weighted_alt) *weighted_alt = wg_alt;

  const Vector gn = ops.RE * gx;
  auto lq = [&](double q) {
    const double r = 4.0 * q / 3.0;
    double sx = 0.0, sg = 0.0;
    for (int n = 0; n < g.node_count(); ++n) {
      sx += m[n] * std::pow(std::abs(xi[n]), r);
      const double gm = std::sqrt(gn[3 * n] * gn[3 * n] + gn[3 * n + 1] * gn[3 * n + 1] + gn[3 * n + 2] * gn[3 * n + 2]);
      sg += m[n] * std::pow(gm, q);
    }
    return std::pow(sx, 1.0 / r) + std::pow(sg, 1.0 / q);
  };
  d.lq_1 = lq(1.0);
  d.lq_1p1 = lq(1.1);
  d.lq_1p2 = lq(1.2);

  double jt = 0.0;
  for (int n = 0; n < g.node_count(); ++n) jt += m[n] * K[n];
  d.joule_total = jt;
  return d;
}

}  // namespace

RunResult run(const Problem& pb, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const StaggeredGrid& g = pb.grid();
  const ModelConfig& c = pb.model();
  RunResult res;
  res.config = c;
  bool exact = true;
  const int N = step_count(c, &exact);
  if (!exact) {
    res.truncated = true;
    res.warnings.push_back("t_final is not a multiple of tau; horizon truncated to " + std::to_string(N * c.tau));
  }
  res.step_condition_ok = lemma6_step_condition(pb);
  if (!res.step_condition_ok) {
    res.warnings.push_back("tau violates the energy-estimate step condition tau < lambda0/(R_alpha*|f| + |U|)^2");
  }

  EdgeField B = options.B0 ? *options.B0 : sample_B0(g, c.B0_preset, c.magnetic_bc);
  NodeField xi = options.xi0 ? *options.xi0 : NodeField(g.node_count(), 0.0);
  if (static_cast<int>(B.size()) != g.edge_count() || static_cast<int>(xi.size()) != g.node_count()) {
    throw step_error("run: initial field size mismatch");
  }

  std::vector<int> snap_steps;
  for (double ts : options.snapshot_times) {
    const int n = std::clamp(static_cast<int>(std::lround(ts / c.tau)), 0, N);
    if (std::abs(n * c.tau - ts) > 1e-9 * std::max(1.0, ts)) {
      res.warnings.push_back("snapshot time " + std::to_string(ts) + " moved to the step time " +
                             std::to_string(n * c.tau));
    }
    snap_steps.push_back(n);
  }
  auto record = [&](int n) {
    if (options.keep_states) {
      res.B_states.push_back(B);
      res.xi_states.push_back(xi);
    }
    for (int s : snap_steps) {
      if (s == n) res.snapshots.push_back({n * c.tau, B, xi});
    }
  };
  record(0);

  DiagnosticState st;
  const Forcing* fo = options.forcing;
  try {
    for (int n = 1; n <= N; ++n) {
      const double t = n * c.tau;
      EdgeField fm;
      NodeField fh;
      if (fo && fo->magnetic) fm = fo->magnetic(t);
      if (fo && (fo->heat || fo->heat_boundary)) {
        fh.assign(g.node_count(), 0.0);
        if (fo->heat) axpy(1.0, fo->heat(t), fh);
        if (fo->heat_boundary) axpy(1.0, fo->heat_boundary(t), fh);
      }
      MagneticStepResult ms = magnetic_step(pb, B, xi, t, fm.empty() ? nullptr : &fm);
      HeatStepResult hs = heat_step(pb, xi, ms.B, t, fh.empty() ? nullptr : &fh);
      B = std::move(ms.B);
      xi = std::move(hs.xi);

      const auto& m = g.node_mass();
      for (int i = 0; i < g.node_count(); ++i) {
        res.max_source = std::max(res.max_source, std::abs(hs.source[i]));
        res.cutoff_residual_L1 += c.tau * m[i] * std::abs(hs.uncut[i] - hs.source[i]);
        res.cutoff_bound_L1 += c.tau * c.epsilon * m[i] * hs.uncut[i] * hs.uncut[i];
      }
      double alt = 0.0;
      StepDiagnostics d = diagnose(pb, n, B, xi, hs.K, st, &alt);
      d.lin_iters = ms.report.iterations;
      d.newton_iters = hs.report.iterations;
      res.diagnostics.push_back(d);
      res.weighted_grad_alt.push_back(alt);
      record(n);
    }
  } catch (const Error& e) {
    res.error = e.what();
    res.error_kind = e.kind();
  }
  res.B_final = B;
  res.xi_final = xi;
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::pair<EdgeField, NodeField> interpolant_eval(const RunResult& r, Interpolant which, double t) {
  if (r.B_states.empty()) throw step_error("interpolant_eval: run did not keep its states");
  const int N = static_cast<int>(r.B_states.size()) - 1;
  const double tau = r.config.tau;
  if (t < 0.0 || t > N * tau * (1.0 + 1e-12)) throw step_error("interpolant_eval: t outside [0, N*tau]");
  if (t <= 0.0 || N == 0) return {r.B_states[0], r.xi_states[0]};
  int n = static_cast<int>(std::ceil(t / tau - 1e-9));
  n = std::clamp(n, 1, N);
  switch (which) {
    case Interpolant::PiecewiseConstant: return {r.B_states[n], r.xi_states[n]};
    case Interpolant::LaggedConstant: return {r.B_states[n - 1], r.xi_states[n - 1]};
    case Interpolant::PiecewiseLinear: {
      double L = std::clamp((t - (n - 1) * tau) / tau, 0.0, 1.0);
      // Nodal times hit the stored states exactly.
      if (std::abs(t - n * tau) <= 1e-12 * std::max(1.0, t)) L = 1.0;
      EdgeField B(r.B_states[n].size());
      NodeField xi(r.xi_states[n].size());
      for (std::size_t i = 0; i < B.size(); ++i) B[i] = L * r.B_states[n][i] + (1.0 - L) * r.B_states[n - 1][i];
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = L * r.xi_states[n][i] + (1.0 - L) * r.xi_states[n - 1][i];
      return {B, xi};
    }
  }
  return {r.B_states[n], r.xi_states[n]};
}

}  // namespace mheat
