#pragma once

#include <string>
#include <vector>

#include "mheat/grid.hpp"
#include "mheat/sparse.hpp"
#include "mheat/vec3.hpp"

namespace mheat {

// Flat DOF vectors; length is the matching grid count.
using EdgeField = Vector;
using FaceField = Vector;
using NodeField = Vector;

// Matrix-free mimetic operators.
FaceField curl(const StaggeredGrid& grid, const EdgeField& e);
NodeField divergence(const StaggeredGrid& grid, const EdgeField& e);
EdgeField grad(const StaggeredGrid& grid, const NodeField& w);

// Mean of the nearest like-direction edges around each target entity.
std::vector<Vec3> reconstruct_vector(const StaggeredGrid& grid, const EdgeField& e, EntityKind at);

enum class InnerKind { Edge, Face, Node, Gamma2Surface };

// Σ weightᵢ massᵢ aᵢ bᵢ; Gamma2Surface uses the per-node Γ₂ weights.
double inner(const StaggeredGrid& grid, InnerKind kind, const Vector& a, const Vector& b,
             const Vector* weight = nullptr);

// Node mass on interior nodes, zero on ∂Ω; weights the grad-div penalty and ‖∇·B‖.
Vector interior_node_weights(const StaggeredGrid& grid);

// Names: curl, divergence, divergence_interior, grad, edge_to_node, face_to_node,
// edge_to_face, edge_to_edge, node_mass, edge_mass, face_mass, curl_curl,
// grad_div, node_laplacian, curl_curl_grad_div.
// The composite curl_curl_grad_div is mass_shift·M_E + Cᵀdiag(M_F·face_weight)C + Λ·grad_div.
struct OpSpec {
  std::string name;
  Vector face_weight;  // empty means 1
  double Lambda = 0.0;
  double mass_shift = 0.0;
};

SparseMatrix assemble(const StaggeredGrid& grid, const OpSpec& spec);
SparseMatrix assemble(const StaggeredGrid& grid, const std::string& name);

// Operators reused by every time step on one grid.
struct MimeticOperators {
  explicit MimeticOperators(const StaggeredGrid& grid);

  SparseMatrix C, Ct;    // curl: faces x edges
  SparseMatrix G, Gt;    // grad: edges x nodes
  SparseMatrix D;        // divergence with one-sided boundary rows
  SparseMatrix RE;       // 3N x E, edge field -> node vectors (row 3n+c)
  SparseMatrix RF;       // 3N x F, face field -> node vectors
  SparseMatrix RFC, RFCt;  // node-reconstructed curl
  SparseMatrix grad_div;   // Dᵀ diag(interior node mass) D
  SparseMatrix laplacian;  // Gᵀ M_E G
  Vector interior_weight;
};

}  // namespace mheat
