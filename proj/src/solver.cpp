#include "mheat/solver.hpp"

#include <cmath>
#include <limits>

#include "mheat/error.hpp"
#include "mheat/physics.hpp"

namespace mheat {

namespace {

Vector inverse_diagonal(const SparseMatrix& A) {
  Vector d = A.diagonal();
  for (double& v : d) v = (v > 0.0 || v < 0.0) ? 1.0 / v : 1.0;
  return d;
}

void check_square(const SparseMatrix& A, const Vector& b, const char* who) {
  if (A.rows() != A.cols() || static_cast<int>(b.size()) != A.rows()) {
    throw solver_error(std::string(who) + ": dimension mismatch");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw solver_error(std::string(who) + ": non-finite right-hand side");
  }
}

}  // namespace

SolveResult solve_spd(const SparseMatrix& A, const Vector& b, double tol, int max_iter, const Vector* x0) {
  check_square(A, b, "solve_spd");
  const int n = A.rows();
  SolveResult res;
  res.report.method = "pcg-jacobi";
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.report.converged = true;
    return res;
  }
  res.x = x0 ? *x0 : Vector(n, 0.0);
  Vector& x = res.x;
  const Vector dinv = inverse_diagonal(A);
  Vector r = b;
  Vector Ap(n);
  if (x0) {
    A.apply(x, Ap);
    axpy(-1.0, Ap, r);
  }
  double rel = l2_norm(r) / bnorm;
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  Vector p = z;
  double rz = dot(r, z);
  int it = 0;
  while (rel > tol && it < max_iter) {
    A.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (std::isnan(pAp)) throw solver_error("pcg: NaN encountered");
    if (pAp <= 0.0) break;
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    ++it;
    rel = l2_norm(r) / bnorm;
    if (std::isnan(rel)) throw solver_error("pcg: NaN residual");
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.report.iterations = it;
  res.report.final_residual = rel;
  res.report.converged = rel <= tol;
  return res;
}

SolveResult solve_nonsymmetric(const SparseMatrix& A, const Vector& b, double tol, int max_iter, const Vector* x0) {
  check_square(A, b, "solve_nonsymmetric");
  const int n = A.rows();
  SolveResult res;
  res.report.method = "bicgstab-jacobi";
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.report.converged = true;
    return res;
  }
  res.x = x0 ? *x0 : Vector(n, 0.0);
  Vector& x = res.x;
  const Vector dinv = inverse_diagonal(A);
  Vector r(n), rhat(n), p(n), v(n), y(n), s(n), zv(n), t(n);
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

  auto residual = [&] {
    A.apply(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return l2_norm(r) / bnorm;
  };

  double rel = residual();
  int it = 0;
  int restarts = 0;
  int refreshes = 0;
  rhat = r;
  while (rel > tol && it < max_iter) {
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    bool breakdown = false;
    while (rel > tol && it < max_iter) {
      const double rho_new = dot(rhat, r);
      if (std::abs(rho_new) <= 1e-30 * l2_norm(rhat) * l2_norm(r) + tiny) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (int i = 0; i < n; ++i) y[i] = dinv[i] * p[i];
      A.apply(y, v);
      const double rv = dot(rhat, v);
      if (std::abs(rv) <= tiny) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      if (l2_norm(s) / bnorm <= tol) {
        axpy(alpha, y, x);
        rel = residual();
        break;
      }
      for (int i = 0; i < n; ++i) zv[i] = dinv[i] * s[i];
      A.apply(zv, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      axpy(alpha, y, x);
      axpy(omega, zv, x);
      for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
      rel = l2_norm(r) / bnorm;
      if (std::isnan(rel)) throw solver_error("bicgstab: NaN residual");
      if (omega == 0.0) {
        breakdown = true;
        break;
      }
    }
    if (!breakdown) {
      // The recursive residual drifts from the true one near round-off; restart from the true residual.
      rel = residual();
      if (rel <= tol || it >= max_iter || ++refreshes > 10) break;
      rhat = r;
      continue;
    }
    if (++restarts > 3) {
      throw solver_error("bicgstab: breakdown persisted after 3 restarts (iteration " + std::to_string(it) +
                         ", relative residual " + std::to_string(rel) + ")");
    }
    rel = residual();
    for (int i = 0; i < n; ++i) rhat[i] = r[i] * (1.0 + 0.25 * std::sin(1.0 + i * 0.7 + restarts));
  }
  rel = residual();
  res.report.iterations = it;
  res.report.final_residual = rel;
  res.report.converged = rel <= tol;
  return res;
}

Vector heat_residual(const HeatSystem& sys, const Vector& xi, const Vector& rhs) {
  Vector r = sys.A * xi;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (sys.surface_weight[i] != 0.0) {
      r[i] += sys.surface_weight[i] * psi_jump(xi[i], sys.theta0[i], sys.zeta, sys.omega);
    }
    r[i] -= rhs[i];
  }
  return r;
}

double heat_merit(const HeatSystem& sys, const Vector& residual) {
  double s = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) s += residual[i] * residual[i] / sys.mass[i];
  return std::sqrt(s);
}

SolveResult solve_heat_step_newton(const HeatSystem& sys, const Vector& rhs, const Vector& xi_guess, double tol,
                                   int max_iter) {
  const int n = sys.A.rows();
  if (static_cast<int>(rhs.size()) != n || static_cast<int>(xi_guess.size()) != n ||
      static_cast<int>(sys.surface_weight.size()) != n || static_cast<int>(sys.theta0.size()) != n ||
      static_cast<int>(sys.mass.size()) != n) {
    throw solver_error("newton: dimension mismatch");
  }
  SolveResult res;
  res.report.method = "newton-armijo";
  res.x = xi_guess;
  Vector& xi = res.x;
  Vector R = heat_residual(sys, xi, rhs);
  double merit = heat_merit(sys, R);

  // Size of the individual terms, used to recognise a root at round-off level.
  auto roundoff_floor = [&] {
    Vector Ax = sys.A * xi;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double mag = std::abs(Ax[i]) + std::abs(rhs[i]);
      if (sys.surface_weight[i] != 0.0) {
        mag += sys.surface_weight[i] * std::abs(psi_jump(xi[i], sys.theta0[i], sys.zeta, sys.omega));
      }
      s += mag * mag / sys.mass[i];
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(s);
  };

  int it = 0;
  while (merit > tol) {
    if (std::isnan(merit)) throw solver_error("newton: NaN residual");
    if (it >= max_iter) break;
    Vector jdiag(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (sys.surface_weight[i] != 0.0) jdiag[i] = sys.surface_weight[i] * psi_prime(xi[i] + sys.theta0[i], sys.zeta, sys.omega);
    }
    const SparseMatrix J = sys.A + SparseMatrix::diagonal_matrix(jdiag);
    for (double d : J.diagonal()) {
      if (!(d > 0.0)) throw solver_error("newton: Jacobian has a non-positive diagonal entry (not SPD)");
    }
    Vector minusR = R;
    for (double& v : minusR) v = -v;
    const SolveResult lin = solve_spd(J, minusR, 1e-13, 10 * n + 100);
    res.report.inner_iterations += lin.report.iterations;
    if (!lin.report.converged && lin.report.final_residual > 1e-8) {
      throw solver_error("newton: Jacobian solve failed (relative residual " + std::to_string(lin.report.final_residual) +
                         "); Jacobian not SPD?");
    }
    double alpha = 1.0;
    Vector trial(n);
    Vector Rt;
    double merit_t = 0.0;
    while (true) {
      for (int i = 0; i < n; ++i) trial[i] = xi[i] + alpha * lin.x[i];
      Rt = heat_residual(sys, trial, rhs);
      merit_t = heat_merit(sys, Rt);
      if (merit_t <= (1.0 - 1e-4 * alpha) * merit) break;
      alpha *= 0.5;
      if (alpha < 1e-12) {
        if (merit <= roundoff_floor()) {
          res.report.iterations = it;
          res.report.final_residual = merit;
          res.report.converged = true;
          return res;
        }
        throw solver_error("newton: damping underflow (step < 1e-12) at iteration " + std::to_string(it) +
                           ", merit " + std::to_string(merit));
      }
    }
    xi = trial;
    R = std::move(Rt);
    merit = merit_t;
    ++it;
  }
  res.report.iterations = it;
  res.report.final_residual = merit;
  res.report.converged = merit <= tol;
  return res;
}

}  // namespace mheat
