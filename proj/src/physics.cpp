#include "mheat/physics.hpp"

#include "mheat/error.hpp"

namespace mheat {

std::pair<double, double> quench_lipschitz_gap(const Vec3& a, const Vec3& b, double gamma) {
  const Vec3 qa = quench(a, 1.0, gamma);
  const Vec3 qb = quench(b, 1.0, gamma);
  return {norm(qb - qa), 2.25 * norm(b - a)};
}

NodeField joule_density(const MimeticOperators& ops, const ModelConfig& cfg, const EdgeField& B,
                        const std::vector<Vec3>& U_at_nodes, const NodeField& f_at_nodes) {
  if (static_cast<int>(B.size()) != ops.RE.cols()) throw operator_error("joule_density: B size mismatch");
  const int n = ops.RE.rows() / 3;
  if (static_cast<int>(U_at_nodes.size()) != n || static_cast<int>(f_at_nodes.size()) != n) {
    throw operator_error("joule_density: node data size mismatch");
  }
  const Vector b = ops.RE * B;
  const Vector c = ops.RFC * B;
  NodeField K(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 bn{b[3 * i], b[3 * i + 1], b[3 * i + 2]};
    const Vec3 cn{c[3 * i], c[3 * i + 1], c[3 * i + 2]};
    K[i] = joule_point(cn, bn, U_at_nodes[i], f_at_nodes[i], cfg);
  }
  return K;
}

NodeField joule_density(const StaggeredGrid& grid, const ModelConfig& cfg, const EdgeField& B,
                        const std::vector<Vec3>& U_at_nodes, const NodeField& f_at_nodes) {
  return joule_density(MimeticOperators(grid), cfg, B, U_at_nodes, f_at_nodes);
}

}  // namespace mheat
