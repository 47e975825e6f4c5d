#include "mheat/operators.hpp"

#include <cmath>

#include "mheat/error.hpp"
#include "mheat/physics.hpp"

namespace mheat {

namespace {

void zero_constrained_edges(const Problem& pb, EdgeField& v) {
  std::vector<char> free(v.size(), 0);
  for (int e : pb.free_edges()) free[e] = 1;
  for (std::size_t e = 0; e < v.size(); ++e) {
    if (!free[e]) v[e] = 0.0;
  }
}

void zero_gamma1_nodes(const Problem& pb, NodeField& v) {
  const auto& cls = pb.grid().node_boundary_class();
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (cls[n] == NodeClass::Gamma1) v[n] = 0.0;
  }
}

void check_edge_bc(const Problem& pb, const EdgeField& A) {
  if (static_cast<int>(A.size()) != pb.grid().edge_count()) throw operator_error("apply_P: edge field size mismatch");
  if (pb.model().magnetic_bc == MagneticBc::Natural) return;
  const auto& mask = pb.grid().tangential_boundary_edge_mask();
  for (std::size_t e = 0; e < A.size(); ++e) {
    if (mask[e] && A[e] != 0.0) throw operator_error("apply_P: field violates the essential condition B x n = 0");
  }
}

void check_gamma1(const Problem& pb, const NodeField& w) {
  if (static_cast<int>(w.size()) != pb.grid().node_count()) throw operator_error("apply_L: node field size mismatch");
  const auto& cls = pb.grid().node_boundary_class();
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (cls[n] == NodeClass::Gamma1 && w[n] != 0.0) throw operator_error("apply_L: field does not vanish on Gamma1");
  }
}

double dual_norm(const SparseMatrix& gram, const Vector& r) {
  const SolveResult s = solve_spd(gram, r, 1e-13, 20 * gram.rows() + 100);
  if (!s.report.converged && s.report.final_residual > 1e-9) throw solver_error("dual norm: Gram solve failed");
  return std::sqrt(std::max(0.0, dot(r, s.x)));
}

}  // namespace

EdgeField P_functional(const Problem& pb, const NodeField& xi_frozen, double t, const EdgeField& A) {
  check_edge_bc(pb, A);
  if (static_cast<int>(xi_frozen.size()) != pb.grid().node_count()) {
    throw operator_error("apply_P: xi_frozen size mismatch");
  }
  const StaggeredGrid& g = pb.grid();
  const ModelConfig& c = pb.model();
  const MimeticOperators& ops = pb.ops();

  FaceField cA = ops.C * A;
  const Vector lam = pb.face_lambda(xi_frozen);
  for (int f = 0; f < g.face_count(); ++f) cA[f] *= lam[f] * g.face_mass()[f];
  EdgeField out = ops.Ct * cA;
  for (int e = 0; e < g.edge_count(); ++e) out[e] += g.edge_mass()[e] * A[e] / c.tau;
  if (c.Lambda != 0.0) axpy(c.Lambda, ops.grad_div * A, out);

  const Vector an = ops.RE * A;
  const NodeField f = pb.f(t);
  Vector w(an.size());
  for (int n = 0; n < g.node_count(); ++n) {
    const Vec3 b{an[3 * n], an[3 * n + 1], an[3 * n + 2]};
    const Vec3 v = c.R_alpha * quench(b, f[n], c.gamma) + cross(pb.U()[n], b);
    for (int k = 0; k < 3; ++k) w[3 * n + k] = g.node_mass()[n] * v[k];
  }
  axpy(-1.0, ops.RFCt * w, out);
  zero_constrained_edges(pb, out);
  return out;
}

NodeField L_linear_functional(const Problem& pb, const NodeField& w) {
  check_gamma1(pb, w);
  const ModelConfig& c = pb.model();
  NodeField out = pb.ops().laplacian * w;
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = c.kappa * out[n] + pb.grid().node_mass()[n] * w[n] / c.tau;
  zero_gamma1_nodes(pb, out);
  return out;
}

NodeField L_functional(const Problem& pb, const NodeField& w) {
  NodeField out = L_linear_functional(pb, w);
  const ModelConfig& c = pb.model();
  const auto& sw = pb.grid().gamma2_weights();
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (sw[n] != 0.0) out[n] += sw[n] * psi_jump(w[n], pb.theta0()[n], c.zeta, c.omega);
  }
  zero_gamma1_nodes(pb, out);
  return out;
}

EdgeField apply_P(const Problem& pb, const NodeField& xi_frozen, double t, const EdgeField& A) {
  EdgeField r = P_functional(pb, xi_frozen, t, A);
  for (std::size_t e = 0; e < r.size(); ++e) r[e] /= pb.grid().edge_mass()[e];
  return r;
}

NodeField apply_L(const Problem& pb, const NodeField& w) {
  NodeField r = L_functional(pb, w);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] /= pb.grid().node_mass()[n];
  return r;
}

double norm_V(const Problem& pb, const EdgeField& B) {
  const StaggeredGrid& g = pb.grid();
  const MimeticOperators& ops = pb.ops();
  const FaceField cb = ops.C * B;
  const NodeField db = ops.D * B;
  double s = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) s += g.edge_mass()[e] * B[e] * B[e];
  for (int f = 0; f < g.face_count(); ++f) s += g.face_mass()[f] * cb[f] * cb[f];
  for (int n = 0; n < g.node_count(); ++n) s += ops.interior_weight[n] * db[n] * db[n];
  return std::sqrt(s);
}

double norm_H1(const Problem& pb, const NodeField& xi) {
  const StaggeredGrid& g = pb.grid();
  const EdgeField gx = pb.ops().G * xi;
  double s = 0.0;
  for (int n = 0; n < g.node_count(); ++n) s += g.node_mass()[n] * xi[n] * xi[n];
  for (int e = 0; e < g.edge_count(); ++e) s += g.edge_mass()[e] * gx[e] * gx[e];
  return std::sqrt(s);
}

double dual_norm_V(const Problem& pb, const EdgeField& functional) {
  const StaggeredGrid& g = pb.grid();
  const SparseMatrix gram = SparseMatrix::diagonal_matrix(g.edge_mass()) + weighted_gram(pb.ops().C, g.face_mass()) +
                            pb.ops().grad_div;
  const auto& fe = pb.free_edges();
  return dual_norm(gram.submatrix(fe, fe), pb.restrict_edges(functional));
}

double dual_norm_H1(const Problem& pb, const NodeField& functional) {
  const StaggeredGrid& g = pb.grid();
  const SparseMatrix gram = SparseMatrix::diagonal_matrix(g.node_mass()) + pb.ops().laplacian;
  const auto& fn = pb.free_nodes();
  return dual_norm(gram.submatrix(fn, fn), pb.restrict_nodes(functional));
}

}  // namespace mheat
