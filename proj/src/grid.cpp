#include "mheat/grid.hpp"

#include <sstream>

#include "mheat/error.hpp"

namespace mheat {

namespace {

constexpr const char* kFaceNames[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};

bool on_face(const Coord2& p, const std::array<int, 3>& cells, BoxFace f) {
  const int axis = static_cast<int>(f) / 2;
  const bool upper = static_cast<int>(f) % 2 == 1;
  return p[axis] == (upper ? 2 * cells[axis] : 0);
}

bool at_boundary(int p, int n) { return p == 0 || p == 2 * n; }

}  // namespace

BoxFaceSet::BoxFaceSet(std::initializer_list<BoxFace> faces) {
  for (BoxFace f : faces) insert(f);
}

BoxFaceSet BoxFaceSet::parse(const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(normalized);
  BoxFaceSet set;
  std::string token;
  while (in >> token) {
    bool found = false;
    for (int f = 0; f < 6; ++f) {
      if (token == kFaceNames[f]) {
        set.insert(static_cast<BoxFace>(f));
        found = true;
      }
    }
    if (!found) throw config_error("unknown box face '" + token + "' (expected x-, x+, y-, y+, z-, z+)");
  }
  return set;
}

std::string BoxFaceSet::to_string() const {
  std::string out;
  for (int f = 0; f < 6; ++f) {
    if (contains(static_cast<BoxFace>(f))) {
      if (!out.empty()) out += ',';
      out += kFaceNames[f];
    }
  }
  return out;
}

const char* to_string(BoxFace f) { return kFaceNames[static_cast<int>(f)]; }

StaggeredGrid::StaggeredGrid(Vec3 extents, std::array<int, 3> cells, BoxFaceSet gamma1)
    : extents_(extents), cells_(cells), gamma1_(gamma1) {
  for (int a = 0; a < 3; ++a) {
    if (!(extents[a] > 0.0)) throw grid_error("extent along axis " + std::to_string(a) + " must be > 0");
    if (cells[a] < 2) throw grid_error("cell count along axis " + std::to_string(a) + " must be >= 2");
    spacing_[a] = extents[a] / cells[a];
  }
  if (gamma1.empty()) throw config_error("gamma1_faces is empty: the model needs a Dirichlet boundary");
  if (gamma1.full()) throw config_error("gamma1_faces covers all six faces: the radiation boundary is empty");

  const auto nd = node_dims();
  node_count_ = nd[0] * nd[1] * nd[2];
  edge_offset_[0] = face_offset_[0] = 0;
  for (int d = 0; d < 3; ++d) {
    const auto ed = edge_dims(d);
    const auto fd = face_dims(d);
    edge_offset_[d + 1] = edge_offset_[d] + ed[0] * ed[1] * ed[2];
    face_offset_[d + 1] = face_offset_[d] + fd[0] * fd[1] * fd[2];
  }

  auto control_volume = [&](const Coord2& p) {
    double v = 1.0;
    for (int a = 0; a < 3; ++a) {
      const bool half = p[a] % 2 == 0 && at_boundary(p[a], cells_[a]);
      v *= half ? 0.5 * spacing_[a] : spacing_[a];
    }
    return v;
  };

  node_mass_.resize(node_count_);
  node_class_.resize(node_count_);
  gamma2_weight_.assign(node_count_, 0.0);
  for (int n = 0; n < node_count_; ++n) {
    const Coord2 p = coord2(EntityKind::Node, n);
    node_mass_[n] = control_volume(p);
    NodeClass cls = NodeClass::Interior;
    if (is_boundary_node(n)) {
      cls = NodeClass::Gamma2;
      for (int f = 0; f < 6; ++f) {
        if (gamma1_.contains(static_cast<BoxFace>(f)) && on_face(p, cells_, static_cast<BoxFace>(f))) {
          cls = NodeClass::Gamma1;
        }
      }
    }
    node_class_[n] = cls;
    for (int f = 0; f < 6; ++f) {
      const auto face = static_cast<BoxFace>(f);
      if (gamma1_.contains(face) || !on_face(p, cells_, face)) continue;
      const int axis = f / 2;
      double w = 1.0;
      for (int a = 0; a < 3; ++a) {
        if (a == axis) continue;
        w *= at_boundary(p[a], cells_[a]) ? 0.5 * spacing_[a] : spacing_[a];
      }
      gamma2_weight_[n] += w;
      gamma2_face_weights_.push_back({n, face, w});
    }
  }

  edge_mass_.resize(edge_count());
  tangential_mask_.resize(edge_count());
  for (int e = 0; e < edge_count(); ++e) {
    const Coord2 p = coord2(EntityKind::Edge, e);
    edge_mass_[e] = control_volume(p);
    bool tangential = false;
    for (int a = 0; a < 3; ++a) {
      if (p[a] % 2 == 0 && at_boundary(p[a], cells_[a])) tangential = true;
    }
    tangential_mask_[e] = tangential ? 1 : 0;
  }

  face_mass_.resize(face_count());
  for (int f = 0; f < face_count(); ++f) face_mass_[f] = control_volume(coord2(EntityKind::Face, f));
}

int StaggeredGrid::count(EntityKind kind) const {
  switch (kind) {
    case EntityKind::Node: return node_count();
    case EntityKind::Edge: return edge_count();
    case EntityKind::Face: return face_count();
  }
  return 0;
}

std::array<int, 3> StaggeredGrid::node_dims() const {
  return {cells_[0] + 1, cells_[1] + 1, cells_[2] + 1};
}

std::array<int, 3> StaggeredGrid::edge_dims(int dir) const {
  std::array<int, 3> d{};
  for (int a = 0; a < 3; ++a) d[a] = cells_[a] + (a == dir ? 0 : 1);
  return d;
}

std::array<int, 3> StaggeredGrid::face_dims(int dir) const {
  std::array<int, 3> d{};
  for (int a = 0; a < 3; ++a) d[a] = cells_[a] + (a == dir ? 1 : 0);
  return d;
}

int StaggeredGrid::node_index(int i, int j, int k) const {
  const auto d = node_dims();
  return i + d[0] * (j + d[1] * k);
}

int StaggeredGrid::edge_index(int dir, int i, int j, int k) const {
  const auto d = edge_dims(dir);
  return edge_offset_[dir] + i + d[0] * (j + d[1] * k);
}

int StaggeredGrid::face_index(int dir, int i, int j, int k) const {
  const auto d = face_dims(dir);
  return face_offset_[dir] + i + d[0] * (j + d[1] * k);
}

EntityId StaggeredGrid::entity(EntityKind kind, int index) const {
  if (index < 0 || index >= count(kind)) {
    throw grid_error("entity index " + std::to_string(index) + " out of range");
  }
  int dir = -1;
  int local = index;
  std::array<int, 3> dims = node_dims();
  if (kind != EntityKind::Node) {
    const auto& offset = kind == EntityKind::Edge ? edge_offset_ : face_offset_;
    dir = 0;
    while (index >= offset[dir + 1]) ++dir;
    local = index - offset[dir];
    dims = kind == EntityKind::Edge ? edge_dims(dir) : face_dims(dir);
  }
  const int i = local % dims[0];
  const int j = (local / dims[0]) % dims[1];
  const int k = local / (dims[0] * dims[1]);
  return {kind, dir, {i, j, k}};
}

int StaggeredGrid::index_of(const EntityId& id) const {
  const auto& [i, j, k] = id.ijk;
  switch (id.kind) {
    case EntityKind::Node: return node_index(i, j, k);
    case EntityKind::Edge: return edge_index(id.dir, i, j, k);
    case EntityKind::Face: return face_index(id.dir, i, j, k);
  }
  return -1;
}

Coord2 StaggeredGrid::coord2(EntityKind kind, int index) const {
  const EntityId id = entity(kind, index);
  Coord2 p{};
  for (int a = 0; a < 3; ++a) {
    int odd = 0;
    if (kind == EntityKind::Edge) odd = a == id.dir ? 1 : 0;
    if (kind == EntityKind::Face) odd = a == id.dir ? 0 : 1;
    p[a] = 2 * id.ijk[a] + odd;
  }
  return p;
}

bool StaggeredGrid::in_range(const Coord2& p) const {
  for (int a = 0; a < 3; ++a) {
    if (p[a] < 0 || p[a] > 2 * cells_[a]) return false;
  }
  return true;
}

int StaggeredGrid::index_at(EntityKind kind, const Coord2& p) const {
  if (!in_range(p)) return -1;
  int odd_count = 0;
  int odd_axis = -1;
  int even_axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (p[a] % 2 != 0) {
      ++odd_count;
      odd_axis = a;
    } else {
      even_axis = a;
    }
  }
  const int i = p[0] / 2;
  const int j = p[1] / 2;
  const int k = p[2] / 2;
  switch (kind) {
    case EntityKind::Node: return odd_count == 0 ? node_index(i, j, k) : -1;
    case EntityKind::Edge: return odd_count == 1 ? edge_index(odd_axis, i, j, k) : -1;
    case EntityKind::Face: return odd_count == 2 ? face_index(even_axis, i, j, k) : -1;
  }
  return -1;
}

Vec3 StaggeredGrid::position(const Coord2& p) const {
  return {0.5 * p[0] * spacing_[0], 0.5 * p[1] * spacing_[1], 0.5 * p[2] * spacing_[2]};
}

Vec3 StaggeredGrid::entity_center(EntityKind kind, int index) const {
  return position(coord2(kind, index));
}

const std::vector<double>& StaggeredGrid::mass(EntityKind kind) const {
  switch (kind) {
    case EntityKind::Node: return node_mass_;
    case EntityKind::Edge: return edge_mass_;
    case EntityKind::Face: return face_mass_;
  }
  return node_mass_;
}

bool StaggeredGrid::is_boundary_node(int n) const {
  const Coord2 p = coord2(EntityKind::Node, n);
  for (int a = 0; a < 3; ++a) {
    if (at_boundary(p[a], cells_[a])) return true;
  }
  return false;
}

double StaggeredGrid::gamma2_area() const {
  double area = 0.0;
  for (int f = 0; f < 6; ++f) {
    if (gamma1_.contains(static_cast<BoxFace>(f))) continue;
    const int axis = f / 2;
    area += volume() / extents_[axis];
  }
  return area;
}

StaggeredGrid build_grid(Vec3 extents, std::array<int, 3> cells, BoxFaceSet gamma1) {
  return StaggeredGrid(extents, cells, gamma1);
}

}  // namespace mheat
