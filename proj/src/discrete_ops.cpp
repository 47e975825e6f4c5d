#include "mheat/discrete_ops.hpp"

#include "mheat/error.hpp"

namespace mheat {

namespace {

void check_size(const Vector& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw operator_error(std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                         std::to_string(v.size()));
  }
}

Coord2 shifted(Coord2 p, int axis, int by) {
  p[axis] += by;
  return p;
}

// Parity of a like-direction source entity holding component c.
std::array<int, 3> source_parity(EntityKind source, int c) {
  std::array<int, 3> par{};
  for (int a = 0; a < 3; ++a) {
    if (source == EntityKind::Edge) par[a] = a == c ? 1 : 0;
    else par[a] = a == c ? 0 : 1;
  }
  return par;
}

SparseMatrix reconstruction(const StaggeredGrid& grid, EntityKind source, EntityKind target) {
  const int nt = grid.count(target);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nt) * 3 * 4);
  std::vector<Coord2> pts;
  for (int idx = 0; idx < nt; ++idx) {
    const Coord2 q = grid.coord2(target, idx);
    for (int c = 0; c < 3; ++c) {
      const auto par = source_parity(source, c);
      pts.assign(1, q);
      for (int a = 0; a < 3; ++a) {
        if ((q[a] & 1) == par[a]) continue;
        std::vector<Coord2> next;
        for (const Coord2& p : pts) {
          for (int s : {-1, 1}) {
            Coord2 r = shifted(p, a, s);
            if (grid.in_range(r)) next.push_back(r);
          }
        }
        pts.swap(next);
      }
      const double w = 1.0 / static_cast<double>(pts.size());
      for (const Coord2& p : pts) t.push_back({3 * idx + c, grid.index_at(source, p), w});
    }
  }
  return SparseMatrix(3 * nt, grid.count(source), t);
}

SparseMatrix curl_matrix(const StaggeredGrid& grid) {
  const Vec3& h = grid.spacing();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(grid.face_count()) * 4);
  for (int f = 0; f < grid.face_count(); ++f) {
    const Coord2 p = grid.coord2(EntityKind::Face, f);
    const int d = grid.entity(EntityKind::Face, f).dir;
    const int a = (d + 1) % 3;
    const int b = (d + 2) % 3;
    // ∂_a E_b − ∂_b E_a
    t.push_back({f, grid.index_at(EntityKind::Edge, shifted(p, a, 1)), 1.0 / h[a]});
    t.push_back({f, grid.index_at(EntityKind::Edge, shifted(p, a, -1)), -1.0 / h[a]});
    t.push_back({f, grid.index_at(EntityKind::Edge, shifted(p, b, 1)), -1.0 / h[b]});
    t.push_back({f, grid.index_at(EntityKind::Edge, shifted(p, b, -1)), 1.0 / h[b]});
  }
  return SparseMatrix(grid.face_count(), grid.edge_count(), t);
}

SparseMatrix grad_matrix(const StaggeredGrid& grid) {
  const Vec3& h = grid.spacing();
  std::vector<Triplet> t;
  for (int e = 0; e < grid.edge_count(); ++e) {
    const Coord2 p = grid.coord2(EntityKind::Edge, e);
    const int d = grid.entity(EntityKind::Edge, e).dir;
    t.push_back({e, grid.index_at(EntityKind::Node, shifted(p, d, 1)), 1.0 / h[d]});
    t.push_back({e, grid.index_at(EntityKind::Node, shifted(p, d, -1)), -1.0 / h[d]});
  }
  return SparseMatrix(grid.edge_count(), grid.node_count(), t);
}

SparseMatrix divergence_matrix(const StaggeredGrid& grid, bool interior_only) {
  const Vec3& h = grid.spacing();
  const auto& cells = grid.cells();
  std::vector<Triplet> t;
  for (int n = 0; n < grid.node_count(); ++n) {
    if (interior_only && grid.is_boundary_node(n)) continue;
    const Coord2 p = grid.coord2(EntityKind::Node, n);
    for (int d = 0; d < 3; ++d) {
      int ahead = 1;
      int behind = -1;
      if (p[d] == 0) {
        ahead = 3;
        behind = 1;
      } else if (p[d] == 2 * cells[d]) {
        ahead = -1;
        behind = -3;
      }
      t.push_back({n, grid.index_at(EntityKind::Edge, shifted(p, d, ahead)), 1.0 / h[d]});
      t.push_back({n, grid.index_at(EntityKind::Edge, shifted(p, d, behind)), -1.0 / h[d]});
    }
  }
  return SparseMatrix(grid.node_count(), grid.edge_count(), t);
}

}  // namespace

FaceField curl(const StaggeredGrid& grid, const EdgeField& e) {
  check_size(e, grid.edge_count(), "curl");
  const Vec3& h = grid.spacing();
  FaceField out(grid.face_count());
  for (int d = 0; d < 3; ++d) {
    const int a = (d + 1) % 3;
    const int b = (d + 2) % 3;
    const auto dims = grid.face_dims(d);
    for (int k = 0; k < dims[2]; ++k) {
      for (int j = 0; j < dims[1]; ++j) {
        for (int i = 0; i < dims[0]; ++i) {
          const std::array<int, 3> ijk{i, j, k};
          auto edge = [&](int dir, int axis, int off) {
            std::array<int, 3> q = ijk;
            q[axis] += off;
            return e[grid.edge_index(dir, q[0], q[1], q[2])];
          };
          const double dEb_da = (edge(b, a, 1) - edge(b, a, 0)) / h[a];
          const double dEa_db = (edge(a, b, 1) - edge(a, b, 0)) / h[b];
          out[grid.face_index(d, i, j, k)] = dEb_da - dEa_db;
        }
      }
    }
  }
  return out;
}

NodeField divergence(const StaggeredGrid& grid, const EdgeField& e) {
  check_size(e, grid.edge_count(), "divergence");
  const Vec3& h = grid.spacing();
  const auto& n = grid.cells();
  NodeField out(grid.node_count());
  for (int k = 0; k <= n[2]; ++k) {
    for (int j = 0; j <= n[1]; ++j) {
      for (int i = 0; i <= n[0]; ++i) {
        const std::array<int, 3> ijk{i, j, k};
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
          // Cell indices of the two like-direction edges used.
          int hi = ijk[d];
          if (ijk[d] == 0) hi = 1;
          if (ijk[d] == n[d]) hi = n[d] - 1;
          std::array<int, 3> qa = ijk;
          std::array<int, 3> qb = ijk;
          qa[d] = hi;
          qb[d] = hi - 1;
          s += (e[grid.edge_index(d, qa[0], qa[1], qa[2])] - e[grid.edge_index(d, qb[0], qb[1], qb[2])]) / h[d];
        }
        out[grid.node_index(i, j, k)] = s;
      }
    }
  }
  return out;
}

EdgeField grad(const StaggeredGrid& grid, const NodeField& w) {
  check_size(w, grid.node_count(), "grad");
  const Vec3& h = grid.spacing();
  EdgeField out(grid.edge_count());
  for (int d = 0; d < 3; ++d) {
    const auto dims = grid.edge_dims(d);
    for (int k = 0; k < dims[2]; ++k) {
      for (int j = 0; j < dims[1]; ++j) {
        for (int i = 0; i < dims[0]; ++i) {
          std::array<int, 3> q{i, j, k};
          const double w0 = w[grid.node_index(q[0], q[1], q[2])];
          ++q[d];
          const double w1 = w[grid.node_index(q[0], q[1], q[2])];
          out[grid.edge_index(d, i, j, k)] = (w1 - w0) / h[d];
        }
      }
    }
  }
  return out;
}

std::vector<Vec3> reconstruct_vector(const StaggeredGrid& grid, const EdgeField& e, EntityKind at) {
  check_size(e, grid.edge_count(), "reconstruct_vector");
  const Vector flat = reconstruction(grid, EntityKind::Edge, at) * e;
  std::vector<Vec3> out(flat.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
  return out;
}

double inner(const StaggeredGrid& grid, InnerKind kind, const Vector& a, const Vector& b, const Vector* weight) {
  const Vector* mass = nullptr;
  switch (kind) {
    case InnerKind::Edge: mass = &grid.edge_mass(); break;
    case InnerKind::Face: mass = &grid.face_mass(); break;
    case InnerKind::Node: mass = &grid.node_mass(); break;
    case InnerKind::Gamma2Surface: mass = &grid.gamma2_weights(); break;
  }
  const int n = static_cast<int>(mass->size());
  check_size(a, n, "inner");
  check_size(b, n, "inner");
  if (weight) {
    check_size(*weight, n, "inner weight");
    for (double w : *weight) {
      if (!(w > 0.0)) throw operator_error("inner: weights must be positive");
    }
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (weight ? (*weight)[i] : 1.0) * (*mass)[i] * a[i] * b[i];
  return s;
}

Vector interior_node_weights(const StaggeredGrid& grid) {
  Vector w = grid.node_mass();
  for (int n = 0; n < grid.node_count(); ++n) {
    if (grid.is_boundary_node(n)) w[n] = 0.0;
  }
  return w;
}

SparseMatrix assemble(const StaggeredGrid& grid, const OpSpec& spec) {
  const std::string& name = spec.name;
  if (name == "curl") return curl_matrix(grid);
  if (name == "divergence") return divergence_matrix(grid, false);
  if (name == "divergence_interior") return divergence_matrix(grid, true);
  if (name == "grad") return grad_matrix(grid);
  if (name == "edge_to_node") return reconstruction(grid, EntityKind::Edge, EntityKind::Node);
  if (name == "face_to_node") return reconstruction(grid, EntityKind::Face, EntityKind::Node);
  if (name == "edge_to_face") return reconstruction(grid, EntityKind::Edge, EntityKind::Face);
  if (name == "edge_to_edge") return reconstruction(grid, EntityKind::Edge, EntityKind::Edge);
  if (name == "node_mass") return SparseMatrix::diagonal_matrix(grid.node_mass());
  if (name == "edge_mass") return SparseMatrix::diagonal_matrix(grid.edge_mass());
  if (name == "face_mass") return SparseMatrix::diagonal_matrix(grid.face_mass());
  if (name == "grad_div") {
    return weighted_gram(divergence_matrix(grid, true), interior_node_weights(grid));
  }
  if (name == "node_laplacian") return weighted_gram(grad_matrix(grid), grid.edge_mass());
  if (name == "curl_curl" || name == "curl_curl_grad_div") {
    Vector w = grid.face_mass();
    if (!spec.face_weight.empty()) {
      check_size(spec.face_weight, grid.face_count(), "face weight");
      for (int f = 0; f < grid.face_count(); ++f) w[f] *= spec.face_weight[f];
    }
    SparseMatrix m = weighted_gram(curl_matrix(grid), w);
    if (name == "curl_curl") return m;
    Vector shift = grid.edge_mass();
    for (double& v : shift) v *= spec.mass_shift;
    m = m + SparseMatrix::diagonal_matrix(shift);
    if (spec.Lambda != 0.0) {
      m = m + weighted_gram(divergence_matrix(grid, true), interior_node_weights(grid)).scaled(spec.Lambda);
    }
    return m;
  }
  throw operator_error("unknown operator spec '" + name + "'");
}

SparseMatrix assemble(const StaggeredGrid& grid, const std::string& name) {
  return assemble(grid, OpSpec{name, {}, 0.0, 0.0});
}

MimeticOperators::MimeticOperators(const StaggeredGrid& grid)
    : C(curl_matrix(grid)),
      Ct(C.transpose()),
      G(grad_matrix(grid)),
      Gt(G.transpose()),
      D(divergence_matrix(grid, false)),
      RE(reconstruction(grid, EntityKind::Edge, EntityKind::Node)),
      RF(reconstruction(grid, EntityKind::Face, EntityKind::Node)),
      RFC(RF * C),
      RFCt(RFC.transpose()),
      interior_weight(interior_node_weights(grid)) {
  grad_div = weighted_gram(divergence_matrix(grid, true), interior_weight);
  laplacian = weighted_gram(G, grid.edge_mass());
}

}  // namespace mheat
