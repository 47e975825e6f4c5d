#include "mheat/mms.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>

#include "mheat/dual.hpp"
#include "mheat/operators.hpp"
#include "mheat/physics.hpp"
#include "mheat/presets.hpp"

namespace mheat {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-axis factor of ξ*: which box faces of that axis belong to Γ₁.
enum class AxisFactor { Both, Lower, Upper, Neither };

struct Manufactured {
  double b_amp = 0.5;
  double xi_amp = 0.5;
  double phase = 0.0;
  double offset = 0.0;
  Vec3 L{1.0, 1.0, 1.0};
  std::array<AxisFactor, 3> factor{};

  template <class S>
  Vec3T<S> B(const Vec3T<S>& x) const {
    using std::sin;
    const S sx = sin(kPi * x[0] / L[0] + phase);
    const S sy = sin(kPi * x[1] / L[1] + phase);
    const S sz = sin(kPi * x[2] / L[2] + phase);
    return {b_amp * (sy * sz), b_amp * (sx * sz), b_amp * (sx * sy)};
  }

  template <class S>
  S xi(const Vec3T<S>& x) const {
    using std::cos;
    using std::sin;
    S r(xi_amp);
    for (int a = 0; a < 3; ++a) {
      const S u = kPi * x[a] / L[a];
      switch (factor[a]) {
        case AxisFactor::Both: r = r * sin(u); break;
        case AxisFactor::Lower: r = r * sin(0.5 * u); break;
        case AxisFactor::Upper: r = r * cos(0.5 * u); break;
        case AxisFactor::Neither: r = r * cos(0.5 * u - 0.3); break;
      }
    }
    return r + offset;
  }
};

Manufactured make_manufactured(const StaggeredGrid& grid, const Preset& p) {
  if (p.name != "sine_product") throw config_error("mms: unknown manufactured preset '" + p.name + "'");
  for (const auto& [key, v] : p.params) {
    if (key != "b_amplitude" && key != "xi_amplitude" && key != "phase" && key != "xi_offset") {
      throw config_error("mms: unknown manufactured parameter '" + key + "'");
    }
  }
  Manufactured ms;
  ms.b_amp = p.get("b_amplitude", 0.5);
  ms.xi_amp = p.get("xi_amplitude", 0.5);
  ms.phase = p.get("phase", 0.0);
  ms.offset = p.get("xi_offset", 0.0);
  ms.L = grid.extents();
  const BoxFaceSet g1 = grid.gamma1_faces();
  for (int a = 0; a < 3; ++a) {
    const bool lo = g1.contains(static_cast<BoxFace>(2 * a));
    const bool hi = g1.contains(static_cast<BoxFace>(2 * a + 1));
    ms.factor[a] = lo && hi ? AxisFactor::Both : lo ? AxisFactor::Lower : hi ? AxisFactor::Upper : AxisFactor::Neither;
  }
  return ms;
}

template <class S, class Fn>
Vec3T<S> curl_of(const Fn& F, const Vec3T<S>& x) {
  using D = Dual<S>;
  std::array<Vec3T<S>, 3> J;
  for (int j = 0; j < 3; ++j) {
    Vec3T<D> y{D(x[0], S(0.0)), D(x[1], S(0.0)), D(x[2], S(0.0))};
    y[j].d = S(1.0);
    const Vec3T<D> v = F(y);
    J[j] = Vec3T<S>{v[0].d, v[1].d, v[2].d};
  }
  return {J[1][2] - J[2][1], J[2][0] - J[0][2], J[0][1] - J[1][0]};
}

template <class Fn>
Vec3 gradient_of(const Fn& u, const Vec3& x) {
  using D = Dual<double>;
  Vec3 g;
  for (int j = 0; j < 3; ++j) {
    Vec3T<D> y{D(x[0], 0.0), D(x[1], 0.0), D(x[2], 0.0)};
    y[j].d = 1.0;
    g[j] = u(y).d;
  }
  return g;
}

template <class Fn>
double laplacian_of(const Fn& u, const Vec3& x) {
  using D = Dual<double>;
  using DD = Dual<D>;
  double lap = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3T<DD> y;
    for (int a = 0; a < 3; ++a) {
      const double s = a == j ? 1.0 : 0.0;
      y[a] = DD(D(x[a], s), D(s, 0.0));
    }
    lap += u(y).d.d;
  }
  return lap;
}

EdgeField interpolate_B(const StaggeredGrid& g, const Manufactured& ms) {
  EdgeField out(g.edge_count());
  const auto& mask = g.tangential_boundary_edge_mask();
  for (int e = 0; e < g.edge_count(); ++e) {
    out[e] = mask[e] ? 0.0 : ms.B(g.entity_center(EntityKind::Edge, e))[g.entity(EntityKind::Edge, e).dir];
  }
  return out;
}

NodeField interpolate_xi(const StaggeredGrid& g, const Manufactured& ms) {
  NodeField out(g.node_count());
  const auto& cls = g.node_boundary_class();
  for (int n = 0; n < g.node_count(); ++n) {
    out[n] = cls[n] == NodeClass::Gamma1 ? 0.0 : ms.xi(g.entity_center(EntityKind::Node, n));
  }
  return out;
}

double source_value(const ModelConfig& c, double xi, double K) {
  const double q = q_of(xi, c.q0, c.q1);
  return c.cutoff_mode == CutoffMode::Product ? cutoff(q * K, c.epsilon) : q * cutoff(K, c.epsilon);
}

double l2_diff(const StaggeredGrid& g, InnerKind kind, const Vector& a, const Vector& b) {
  Vector d = a;
  axpy(-1.0, b, d);
  return std::sqrt(inner(g, kind, d, d));
}

}  // namespace

void check_manufactured(const StaggeredGrid& grid, const ModelConfig& model, const Preset& manufactured) {
  if (model.magnetic_bc != MagneticBc::Essential) throw config_error("mms: requires magnetic_bc = essential");
  const Manufactured ms = make_manufactured(grid, manufactured);
  const double tol = 1e-12 * std::max(1.0, std::abs(ms.b_amp));
  const auto& mask = grid.tangential_boundary_edge_mask();
  for (int e = 0; e < grid.edge_count(); ++e) {
    if (!mask[e]) continue;
    const double v = ms.B(grid.entity_center(EntityKind::Edge, e))[grid.entity(EntityKind::Edge, e).dir];
    if (std::abs(v) > tol) throw config_error("mms: manufactured B violates the tangential boundary condition");
  }
  const auto& cls = grid.node_boundary_class();
  for (int n = 0; n < grid.node_count(); ++n) {
    if (cls[n] != NodeClass::Gamma1) continue;
    if (std::abs(ms.xi(grid.entity_center(EntityKind::Node, n))) > 1e-12 * std::max(1.0, std::abs(ms.xi_amp))) {
      throw config_error("mms: manufactured xi does not vanish on gamma1");
    }
  }
}

DiscreteTrajectory decaying_trajectory() {
  return {[](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); },
          [](double t) { return 1.0 - std::exp(-2.0 * t); }, [](double t) { return 2.0 * std::exp(-2.0 * t); }};
}

DiscreteTrajectory stationary_trajectory() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 1.0; },
          [](double) { return 0.0; }};
}

TrajectoryError run_discrete_trajectory(const StaggeredGrid& grid, const ModelConfig& model,
                                        const SolverSettings& solver, const Preset& manufactured,
                                        const DiscreteTrajectory& traj) {
  check_manufactured(grid, model, manufactured);
  const Manufactured ms = make_manufactured(grid, manufactured);
  const Problem pb(grid, model, solver);
  const ModelConfig& c = pb.model();
  const EdgeField Bh = interpolate_B(grid, ms);
  const NodeField Sh = interpolate_xi(grid, ms);
  const auto& mE = grid.edge_mass();
  const auto& mN = grid.node_mass();
  const auto& W = grid.gamma2_weights();

  auto scaled = [](const Vector& v, double s) {
    Vector r = v;
    for (double& x : r) x *= s;
    return r;
  };

  // Discrete residual of the exact trajectory with non-lagged coefficients.
  Forcing fo;
  fo.magnetic = [&](double t) {
    const EdgeField Bn = scaled(Bh, traj.a(t));
    EdgeField F = P_functional(pb, scaled(Sh, traj.b(t)), t, Bn);
    for (int e = 0; e < grid.edge_count(); ++e) F[e] += mE[e] * (traj.a_dot(t) * Bh[e] - Bn[e] / c.tau);
    return F;
  };
  fo.heat = [&](double t) {
    const NodeField xn = scaled(Sh, traj.b(t));
    const NodeField K = joule_density(pb.ops(), c, scaled(Bh, traj.a(t)), pb.U(), pb.f(t));
    const Vector lap = pb.ops().laplacian * xn;
    NodeField g(grid.node_count());
    for (int n = 0; n < grid.node_count(); ++n) {
      g[n] = mN[n] * traj.b_dot(t) * Sh[n] + c.kappa * lap[n] +
             W[n] * psi_jump(xn[n], pb.theta0()[n], c.zeta, c.omega) + pb.theta0_lift()[n] -
             mN[n] * source_value(c, xn[n], K[n]);
    }
    return g;
  };

  RunOptions opt;
  opt.B0 = scaled(Bh, traj.a(0.0));
  opt.xi0 = scaled(Sh, traj.b(0.0));
  opt.forcing = &fo;
  const RunResult r = run(pb, opt);
  if (!r.ok()) throw Error(r.error_kind, "rothe", "mms run failed: " + *r.error);
  const int N = static_cast<int>(r.diagnostics.size());
  const double T = N * c.tau;
  return {l2_diff(grid, InnerKind::Edge, r.B_final, scaled(Bh, traj.a(T))),
          l2_diff(grid, InnerKind::Node, r.xi_final, scaled(Sh, traj.b(T))), N};
}

MmsLevel stationary_error(const StaggeredGrid& grid, const ModelConfig& model, const SolverSettings& solver,
                          const MmsOptions& options) {
  check_manufactured(grid, model, options.manufactured);
  const Manufactured ms = make_manufactured(grid, options.manufactured);
  ModelConfig m = model;
  m.tau = options.spatial_tau;
  m.t_final = m.tau * options.spatial_max_iters;
  SolverSettings sv = solver;
  sv.tol_lin = std::min(sv.tol_lin, 1e-11);
  Problem pb(grid, m, sv);
  pb.freeze_data_time(0.0);
  const Vec3 L = grid.extents();

  auto u = [&](const auto& y) { return ms.xi(y) + theta0_value(m.theta0_preset, y, L); };
  auto W = [&](const auto& y) {
    using S = std::decay_t<decltype(y[0])>;
    const Vec3T<S> b = ms.B(y);
    const Vec3T<S> cb = curl_of([&](const auto& z) { return ms.B(z); }, y);
    const S lam = lambda_of(u(y), m.lambda0, m.lambda1);
    const S fv = f_value(m.f_preset, y, 0.0, L);
    const Vec3T<S> uu = U_value(m.U_preset, y, L);
    return lam * cb - m.R_alpha * quench(b, fv, m.gamma) - cross(uu, b);
  };

  EdgeField F(grid.edge_count(), 0.0);
  const auto& mask = grid.tangential_boundary_edge_mask();
  for (int e = 0; e < grid.edge_count(); ++e) {
    if (mask[e]) continue;
    F[e] = grid.edge_mass()[e] * curl_of(W, grid.entity_center(EntityKind::Edge, e))[grid.entity(EntityKind::Edge, e).dir];
  }

  NodeField G(grid.node_count(), 0.0);
  const auto& cls = grid.node_boundary_class();
  for (int n = 0; n < grid.node_count(); ++n) {
    if (cls[n] == NodeClass::Gamma1) continue;
    const Vec3 x = grid.entity_center(EntityKind::Node, n);
    const Vec3 b = ms.B(x);
    const Vec3 cb = curl_of([&](const auto& z) { return ms.B(z); }, x);
    const double K = joule_point(cb, b, U_value(m.U_preset, x, L), f_value(m.f_preset, x, 0.0, L), m);
    const double g = -m.kappa * laplacian_of(u, x) - source_value(m, ms.xi(x), K);
    G[n] = grid.node_mass()[n] * g;
  }
  for (const Gamma2Weight& gw : grid.gamma2_face_weights()) {
    if (cls[gw.node] == NodeClass::Gamma1) continue;
    const Vec3 x = grid.entity_center(EntityKind::Node, gw.node);
    const int axis = static_cast<int>(gw.face) / 2;
    const double sign = static_cast<int>(gw.face) % 2 == 1 ? 1.0 : -1.0;
    const double dn = sign * gradient_of(u, x)[axis];
    const double h = m.kappa * dn + psi_jump(ms.xi(x), theta0_value(m.theta0_preset, x, L), m.zeta, m.omega);
    G[gw.node] += gw.weight * h;
  }

  const EdgeField Bex = interpolate_B(grid, ms);
  const NodeField xex = interpolate_xi(grid, ms);
  EdgeField B = Bex;
  NodeField xi = xex;
  MmsLevel lvl;
  lvl.size = grid.spacing()[0];
  for (int it = 1; it <= options.spatial_max_iters; ++it) {
    const double t = it * m.tau;
    MagneticStepResult mstep = magnetic_step(pb, B, xi, t, &F);
    HeatStepResult hstep = heat_step(pb, xi, mstep.B, t, &G);
    const double dB = l2_diff(grid, InnerKind::Edge, mstep.B, B);
    const double dxi = l2_diff(grid, InnerKind::Node, hstep.xi, xi);
    B = std::move(mstep.B);
    xi = std::move(hstep.xi);
    lvl.iterations = it;
    const double nB = std::sqrt(inner(grid, InnerKind::Edge, B, B));
    const double nxi = std::sqrt(inner(grid, InnerKind::Node, xi, xi));
    if (dB <= options.steady_tol * std::max(nB, 1e-300) && dxi <= options.steady_tol * std::max(nxi, 1e-300)) break;
  }
  lvl.err_B = l2_diff(grid, InnerKind::Edge, B, Bex);
  lvl.err_xi = l2_diff(grid, InnerKind::Node, xi, xex);
  return lvl;
}

double fitted_order(const std::vector<double>& sizes, const std::vector<double>& errors) {
  const std::size_t n = sizes.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(sizes[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MmsReport mms_verify(const GridSpec& domain, const ModelConfig& model, const SolverSettings& solver,
                     const MmsOptions& options) {
  if (options.temporal_steps.size() < 2 || options.spatial_cells.size() < 2) {
    throw config_error("mms: needs at least two levels per study");
  }
  {
    const int c = options.temporal_cells;
    const StaggeredGrid g = build_grid(domain.extents, {c, c, c}, domain.gamma1);
    check_manufactured(g, model, options.manufactured);
  }

  MmsReport rep;
  std::vector<double> s, eB, ex;
  {
    const int c = options.temporal_cells;
    const StaggeredGrid g = build_grid(domain.extents, {c, c, c}, domain.gamma1);
    for (int steps : options.temporal_steps) {
      ModelConfig m = model;
      m.t_final = options.temporal_T;
      m.tau = options.temporal_T / steps;
      const TrajectoryError te = run_discrete_trajectory(g, m, solver, options.manufactured, decaying_trajectory());
      rep.temporal.push_back({m.tau, te.err_B, te.err_xi, te.steps});
      s.push_back(m.tau);
      eB.push_back(te.err_B);
      ex.push_back(te.err_xi);
    }
  }
  rep.order_t_B = fitted_order(s, eB);
  rep.order_t_xi = fitted_order(s, ex);

  s.clear();
  eB.clear();
  ex.clear();
  for (int c : options.spatial_cells) {
    const StaggeredGrid g = build_grid(domain.extents, {c, c, c}, domain.gamma1);
    const MmsLevel lvl = stationary_error(g, model, solver, options);
    rep.spatial.push_back(lvl);
    s.push_back(lvl.size);
    eB.push_back(lvl.err_B);
    ex.push_back(lvl.err_xi);
  }
  rep.order_s_B = fitted_order(s, eB);
  rep.order_s_xi = fitted_order(s, ex);

  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  rep.temporal_ok = in(rep.order_t_B, 0.85, 1.15) && in(rep.order_t_xi, 0.85, 1.15);
  rep.spatial_ok = in(rep.order_s_B, 1.75, 2.25) && in(rep.order_s_xi, 1.75, 2.25);
  return rep;
}

}  // namespace mheat
