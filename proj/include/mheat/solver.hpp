#pragma once

#include <string>

#include "mheat/sparse.hpp"

namespace mheat {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative for Krylov solves, absolute mass-weighted for Newton
  bool converged = false;
  std::string method;
  int inner_iterations = 0;  // Newton only: accumulated linear iterations
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

// Jacobi-preconditioned conjugate gradients. Non-convergence (including a
// non-positive curvature breakdown) is reported, a NaN residual throws.
SolveResult solve_spd(const SparseMatrix& A, const Vector& b, double tol, int max_iter,
                      const Vector* x0 = nullptr);

// Jacobi-preconditioned BiCGStab; restarts up to 3 times with a perturbed
// shadow residual after a breakdown, then throws.
SolveResult solve_nonsymmetric(const SparseMatrix& A, const Vector& b, double tol, int max_iter,
                               const Vector* x0 = nullptr);

// Heat step on the free (non-Γ₁) nodes:
//   R(ξ) = A ξ + w ⊙ (Ψ(ξ+θ₀) − Ψ(θ₀)) − rhs,
// with w the lumped Γ₂ surface weights. The merit is sqrt(Σ Rᵢ²/massᵢ).
struct HeatSystem {
  SparseMatrix A;
  Vector surface_weight;
  Vector theta0;
  Vector mass;
  double zeta = 0.0;
  double omega = 0.0;
};

Vector heat_residual(const HeatSystem& sys, const Vector& xi, const Vector& rhs);
double heat_merit(const HeatSystem& sys, const Vector& residual);

// Damped Newton with Armijo backtracking on the merit.
SolveResult solve_heat_step_newton(const HeatSystem& sys, const Vector& rhs, const Vector& xi_guess, double tol,
                                   int max_iter);

}  // namespace mheat
