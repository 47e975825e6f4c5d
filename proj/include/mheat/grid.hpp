#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mheat/vec3.hpp"

namespace mheat {

enum class BoxFace : std::uint8_t { XMinus = 0, XPlus, YMinus, YPlus, ZMinus, ZPlus };

// Subset of the six faces of the box, stored as a bitmask.
class BoxFaceSet {
 public:
  BoxFaceSet() = default;
  BoxFaceSet(std::initializer_list<BoxFace> faces);

  void insert(BoxFace f) { bits_ |= bit(f); }
  bool contains(BoxFace f) const { return (bits_ & bit(f)) != 0; }
  bool empty() const { return bits_ == 0; }
  bool full() const { return bits_ == 0x3F; }
  std::uint8_t bits() const { return bits_; }

  // Accepts "x-", "x+", ... separated by commas or whitespace.
  static BoxFaceSet parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(BoxFaceSet a, BoxFaceSet b) { return a.bits_ == b.bits_; }

 private:
  static std::uint8_t bit(BoxFace f) { return static_cast<std::uint8_t>(1u << static_cast<int>(f)); }
  std::uint8_t bits_ = 0;
};

const char* to_string(BoxFace f);

enum class EntityKind { Node, Edge, Face };

enum class NodeClass : std::uint8_t { Interior, Gamma1, Gamma2 };

// Position of an entity in doubled lattice coordinates: nodes are even in all
// axes, a d-directed edge is odd in d, a face with normal d is even in d only.
using Coord2 = std::array<int, 3>;

struct EntityId {
  EntityKind kind;
  int dir;  // 0..2 for edges/faces, -1 for nodes
  std::array<int, 3> ijk;
};

// Surface quadrature contribution of one Γ₂ box face at one node.
struct Gamma2Weight {
  int node;
  BoxFace face;
  double weight;
};

// Uniform hexahedral grid on [0,Lx]x[0,Ly]x[0,Lz] with staggered DOFs.
// DOF ordering is lexicographic by (direction, k, j, i).
class StaggeredGrid {
 public:
  StaggeredGrid(Vec3 extents, std::array<int, 3> cells, BoxFaceSet gamma1);

  const Vec3& extents() const { return extents_; }
  const std::array<int, 3>& cells() const { return cells_; }
  const Vec3& spacing() const { return spacing_; }
  BoxFaceSet gamma1_faces() const { return gamma1_; }

  int node_count() const { return node_count_; }
  int edge_count() const { return edge_offset_[3]; }
  int face_count() const { return face_offset_[3]; }
  int count(EntityKind kind) const;

  // Lattice dimensions of the entity family.
  std::array<int, 3> node_dims() const;
  std::array<int, 3> edge_dims(int dir) const;
  std::array<int, 3> face_dims(int dir) const;
  int edge_offset(int dir) const { return edge_offset_[dir]; }
  int face_offset(int dir) const { return face_offset_[dir]; }

  int node_index(int i, int j, int k) const;
  int edge_index(int dir, int i, int j, int k) const;
  int face_index(int dir, int i, int j, int k) const;
  EntityId entity(EntityKind kind, int index) const;
  int index_of(const EntityId& id) const;

  Coord2 coord2(EntityKind kind, int index) const;
  // Entity at a doubled coordinate; -1 if outside the grid or kind mismatch.
  int index_at(EntityKind kind, const Coord2& p) const;
  bool in_range(const Coord2& p) const;

  Vec3 entity_center(EntityKind kind, int index) const;
  Vec3 position(const Coord2& p) const;

  // Diagonal control volumes (lumped masses); each sums to |Ω|.
  const std::vector<double>& node_mass() const { return node_mass_; }
  const std::vector<double>& edge_mass() const { return edge_mass_; }
  const std::vector<double>& face_mass() const { return face_mass_; }
  const std::vector<double>& mass(EntityKind kind) const;

  const std::vector<std::uint8_t>& tangential_boundary_edge_mask() const { return tangential_mask_; }
  const std::vector<NodeClass>& node_boundary_class() const { return node_class_; }
  bool is_boundary_node(int n) const;

  // Trapezoidal Γ₂ surface weights per node (zero off Γ₂ faces).
  const std::vector<double>& gamma2_weights() const { return gamma2_weight_; }
  const std::vector<Gamma2Weight>& gamma2_face_weights() const { return gamma2_face_weights_; }

  double volume() const { return extents_[0] * extents_[1] * extents_[2]; }
  double gamma2_area() const;

 private:
  Vec3 extents_;
  std::array<int, 3> cells_;
  Vec3 spacing_;
  BoxFaceSet gamma1_;
  int node_count_ = 0;
  std::array<int, 4> edge_offset_{};
  std::array<int, 4> face_offset_{};
  std::vector<double> node_mass_, edge_mass_, face_mass_;
  std::vector<std::uint8_t> tangential_mask_;
  std::vector<NodeClass> node_class_;
  std::vector<double> gamma2_weight_;
  std::vector<Gamma2Weight> gamma2_face_weights_;
};

// Validating factory: extents > 0, cells >= 2, Γ₁ a nonempty strict subset.
StaggeredGrid build_grid(Vec3 extents, std::array<int, 3> cells, BoxFaceSet gamma1);

}  // namespace mheat
