#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "mheat/config.hpp"
#include "mheat/discrete_ops.hpp"
#include "mheat/vec3.hpp"

namespace mheat {

// Scalar kernels are templates so the manufactured-solution sources can be
// differentiated with dual numbers.

template <class S, class F>
Vec3T<S> quench(const Vec3T<S>& v, const F& f_val, double gamma) {
  return (f_val / (1.0 + gamma * norm2(v))) * v;
}

// (|b/(1+γ|b|²) − a/(1+γ|a|²)|, (9/4)|b−a|)
std::pair<double, double> quench_lipschitz_gap(const Vec3& a, const Vec3& b, double gamma);

template <class S>
S cutoff(const S& d, double epsilon) {
  using std::abs;
  return d / (1.0 + epsilon * abs(d));
}

template <class S>
S psi(const S& s, double zeta, double omega) {
  using std::abs;
  const S a = abs(s);
  return zeta * (a * a * a * s) + omega * s;
}

inline double psi_prime(double s, double zeta, double omega) {
  const double a = std::abs(s);
  return 4.0 * zeta * a * a * a + omega;
}

template <class S, class T>
S psi_jump(const S& xi, const T& theta0, double zeta, double omega) {
  return psi(xi + theta0, zeta, omega) - psi(S(theta0), zeta, omega);
}

template <class S>
S lambda_of(const S& theta, double lambda0, double lambda1) {
  return lambda0 + lambda1 / (1.0 + theta * theta);
}

template <class S>
S q_of(const S& s, double q0, double q1) {
  return q0 + q1 / (1.0 + s * s);
}

// Sup of |d/ds c/(1+s²)| is 3√3/8 · c.
inline double rational_lipschitz(double c) { return 3.0 * std::sqrt(3.0) / 8.0 * std::abs(c); }

template <class S, class U, class F>
S joule_point(const Vec3T<S>& curlB, const Vec3T<S>& B, const Vec3T<U>& Uv, const F& f_val,
              const ModelConfig& cfg) {
  Vec3T<S> u{S(Uv[0]), S(Uv[1]), S(Uv[2])};
  return norm2(curlB) - dot(curlB, cross(u, B)) - cfg.R_alpha * dot(curlB, quench(B, f_val, cfg.gamma));
}

NodeField joule_density(const StaggeredGrid& grid, const ModelConfig& cfg, const EdgeField& B,
                        const std::vector<Vec3>& U_at_nodes, const NodeField& f_at_nodes);
NodeField joule_density(const MimeticOperators& ops, const ModelConfig& cfg, const EdgeField& B,
                        const std::vector<Vec3>& U_at_nodes, const NodeField& f_at_nodes);

}  // namespace mheat
