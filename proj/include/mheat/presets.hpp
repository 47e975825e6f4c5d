#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mheat/config.hpp"
#include "mheat/discrete_ops.hpp"
#include "mheat/vec3.hpp"

namespace mheat {

enum class PresetKind { F, U, B0, Theta0 };

// Throws config_error for unknown names or parameters.
void validate_preset(PresetKind kind, const Preset& preset);

// Closed-form data. Centers and rates are given relative to the box extents L.

template <class S>
S f_value(const Preset& p, const Vec3T<S>& x, double t, const Vec3& L) {
  using std::cos;
  using std::exp;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  if (p.name == "constant") return S(p.get("value", 1.0));
  if (p.name == "gaussian_blob") {
    const double w = p.get("width", 0.25);
    const Vec3T<S> c{S(p.get("cx", 0.5) * L[0]), S(p.get("cy", 0.5) * L[1]), S(p.get("cz", 0.5) * L[2])};
    return p.get("amplitude", 1.0) * exp(-1.0 * norm2(x - c) / (w * w));
  }
  // oscillatory
  return p.get("amplitude", 1.0) * cos(pi * t) * sin(pi * x[0] / L[0]) * sin(pi * x[1] / L[1]) *
         sin(pi * x[2] / L[2]);
}

template <class S>
Vec3T<S> U_value(const Preset& p, const Vec3T<S>& x, const Vec3& L) {
  if (p.name == "solid_rotation") {
    const double rate = p.get("rate", 1.0);
    const S dx = x[0] - p.get("cx", 0.5) * L[0];
    const S dy = x[1] - p.get("cy", 0.5) * L[1];
    return {-rate * dy, rate * dx, S(0.0)};
  }
  if (p.name == "shear") return {p.get("rate", 1.0) * x[2], S(0.0), S(0.0)};
  return {S(0.0), S(0.0), S(0.0)};
}

template <class S>
S theta0_value(const Preset& p, const Vec3T<S>& x, const Vec3& L) {
  if (p.name == "linear_in_z") return p.get("base", 1.0) + p.get("slope", 0.5) * x[2] / L[2];
  return S(p.get("value", 1.0));
}

NodeField sample_f(const StaggeredGrid& grid, const Preset& preset, double t);
std::vector<Vec3> sample_U(const StaggeredGrid& grid, const Preset& preset);
NodeField sample_theta0(const StaggeredGrid& grid, const Preset& preset);
// Edge DOFs with the essential condition applied when bc is Essential.
EdgeField sample_B0(const StaggeredGrid& grid, const Preset& preset, MagneticBc bc);

// Zeroes tangential-boundary edge values.
void apply_essential_bc(const StaggeredGrid& grid, EdgeField& e);

}  // namespace mheat
