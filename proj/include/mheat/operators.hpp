#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mheat/rothe.hpp"

namespace mheat {

// Functional vectors: entry i is ⟨P A, φᵢ⟩ for the basis function φᵢ. The
// Riesz representative divides by the lumped mass and vanishes off the free DOFs.
EdgeField P_functional(const Problem& pb, const NodeField& xi_frozen, double t, const EdgeField& A);
NodeField L_functional(const Problem& pb, const NodeField& w);
// Linear part M_N/τ + κ Gᵀ M_E G of L.
NodeField L_linear_functional(const Problem& pb, const NodeField& w);

EdgeField apply_P(const Problem& pb, const NodeField& xi_frozen, double t, const EdgeField& A);
NodeField apply_L(const Problem& pb, const NodeField& w);

// ‖B‖_V² = ‖B‖² + ‖∇×B‖² + ‖∇·B‖² and ‖ξ‖₁² = ‖ξ‖² + ‖∇ξ‖².
double norm_V(const Problem& pb, const EdgeField& B);
double norm_H1(const Problem& pb, const NodeField& xi);
// Dual norms of functionals, through a solve with the Gram matrix on the free DOFs.
double dual_norm_V(const Problem& pb, const EdgeField& functional);
double dual_norm_H1(const Problem& pb, const NodeField& functional);

}  // namespace mheat
