#include "mheat/presets.hpp"

#include <set>

#include "mheat/error.hpp"

namespace mheat {

namespace {

struct CatalogEntry {
  const char* name;
  std::set<std::string> params;
};

const std::vector<CatalogEntry>& catalog(PresetKind kind) {
  static const std::vector<CatalogEntry> f = {
      {"constant", {"value"}},
      {"gaussian_blob", {"amplitude", "width", "cx", "cy", "cz"}},
      {"oscillatory", {"amplitude"}}};
  static const std::vector<CatalogEntry> u = {
      {"zero", {}}, {"solid_rotation", {"rate", "cx", "cy"}}, {"shear", {"rate"}}};
  static const std::vector<CatalogEntry> b0 = {
      {"zero", {}}, {"divfree_vortex", {"amplitude"}}, {"constant_tangential", {"bx", "by", "bz"}}};
  static const std::vector<CatalogEntry> theta0 = {{"constant", {"value"}},
                                                   {"linear_in_z", {"base", "slope"}}};
  switch (kind) {
    case PresetKind::F: return f;
    case PresetKind::U: return u;
    case PresetKind::B0: return b0;
    case PresetKind::Theta0: return theta0;
  }
  return f;
}

const char* kind_name(PresetKind kind) {
  switch (kind) {
    case PresetKind::F: return "f_preset";
    case PresetKind::U: return "U_preset";
    case PresetKind::B0: return "B0_preset";
    case PresetKind::Theta0: return "theta0_preset";
  }
  return "";
}

}  // namespace

void validate_preset(PresetKind kind, const Preset& preset) {
  for (const CatalogEntry& entry : catalog(kind)) {
    if (preset.name != entry.name) continue;
    for (const auto& [key, value] : preset.params) {
      if (!entry.params.count(key)) {
        throw config_error(std::string(kind_name(kind)) + ": unknown parameter '" + key + "' for " + preset.name);
      }
      if (!std::isfinite(value)) throw config_error(std::string(kind_name(kind)) + ": non-finite " + key);
    }
    if (preset.name == "gaussian_blob" && !(preset.get("width", 0.25) > 0.0)) {
      throw config_error("f_preset: gaussian_blob width must be > 0");
    }
    return;
  }
  std::string names;
  for (const CatalogEntry& entry : catalog(kind)) names += std::string(names.empty() ? "" : ", ") + entry.name;
  throw config_error(std::string(kind_name(kind)) + ": unknown preset '" + preset.name + "' (expected one of " +
                     names + ")");
}

NodeField sample_f(const StaggeredGrid& grid, const Preset& preset, double t) {
  NodeField out(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) {
    out[n] = f_value(preset, grid.entity_center(EntityKind::Node, n), t, grid.extents());
  }
  return out;
}

std::vector<Vec3> sample_U(const StaggeredGrid& grid, const Preset& preset) {
  std::vector<Vec3> out(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) {
    out[n] = U_value(preset, grid.entity_center(EntityKind::Node, n), grid.extents());
  }
  return out;
}

NodeField sample_theta0(const StaggeredGrid& grid, const Preset& preset) {
  NodeField out(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) {
    out[n] = theta0_value(preset, grid.entity_center(EntityKind::Node, n), grid.extents());
  }
  return out;
}

void apply_essential_bc(const StaggeredGrid& grid, EdgeField& e) {
  const auto& mask = grid.tangential_boundary_edge_mask();
  for (int i = 0; i < grid.edge_count(); ++i) {
    if (mask[i]) e[i] = 0.0;
  }
}

EdgeField sample_B0(const StaggeredGrid& grid, const Preset& preset, MagneticBc bc) {
  validate_preset(PresetKind::B0, preset);
  EdgeField e(grid.edge_count(), 0.0);
  if (preset.name == "constant_tangential") {
    const Vec3 b{preset.get("bx", 1.0), preset.get("by", 0.0), preset.get("bz", 0.0)};
    for (int i = 0; i < grid.edge_count(); ++i) e[i] = b[grid.entity(EntityKind::Edge, i).dir];
  } else if (preset.name == "divfree_vortex") {
    // B = curl(0,0,ψ) with ψ sampled at cell centres in the xy-plane, so the
    // discrete divergence cancels exactly at interior nodes.
    constexpr double pi = std::numbers::pi;
    const Vec3& L = grid.extents();
    const Vec3& h = grid.spacing();
    const double amp = preset.get("amplitude", 0.1);
    auto psi = [&](double x, double y, double z) {
      const double sx = std::sin(pi * x / L[0]);
      const double sy = std::sin(pi * y / L[1]);
      return amp * sx * sx * sy * sy * std::sin(pi * z / L[2]);
    };
    for (int i = 0; i < grid.edge_count(); ++i) {
      const int dir = grid.entity(EntityKind::Edge, i).dir;
      const Vec3 x = grid.entity_center(EntityKind::Edge, i);
      if (dir == 0) {
        e[i] = (psi(x[0], x[1] + 0.5 * h[1], x[2]) - psi(x[0], x[1] - 0.5 * h[1], x[2])) / h[1];
      } else if (dir == 1) {
        e[i] = -(psi(x[0] + 0.5 * h[0], x[1], x[2]) - psi(x[0] - 0.5 * h[0], x[1], x[2])) / h[0];
      }
    }
  }
  if (bc == MagneticBc::Essential) apply_essential_bc(grid, e);
  return e;
}

}  // namespace mheat
