#include "mheat/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mheat/error.hpp"
#include "mheat/operators.hpp"
#include "mheat/physics.hpp"
#include "mheat/rng.hpp"

namespace mheat {

namespace {

constexpr long kScalarBlock = 4096;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Error precondition_error(const std::string& what) { return {ErrorKind::Precondition, "operators", what}; }

// Componentwise U[-1,1] scaled by a log-uniform amplitude in [1e-2, 1e2].
double amplitude(std::mt19937_64& rng) { return log_uniform(rng, 1e-2, 1e2); }

Vec3 random_vec(std::mt19937_64& rng) {
  const double a = amplitude(rng);
  return {a * uniform(rng, -1, 1), a * uniform(rng, -1, 1), a * uniform(rng, -1, 1)};
}

EdgeField random_edge_field(const Problem& pb, std::mt19937_64& rng) {
  const double a = amplitude(rng);
  Vector r(pb.free_edges().size());
  for (double& v : r) v = a * uniform(rng, -1, 1);
  return pb.expand_edges(r);
}

NodeField random_node_field(const Problem& pb, std::mt19937_64& rng) {
  const double a = amplitude(rng);
  Vector r(pb.free_nodes().size());
  for (double& v : r) v = a * uniform(rng, -1, 1);
  return pb.expand_nodes(r);
}

// Frozen temperature for λ(ξ+θ₀): moderate amplitude, all of the λ range.
NodeField random_frozen_xi(const Problem& pb, std::mt19937_64& rng) {
  Vector r(pb.free_nodes().size());
  for (double& v : r) v = uniform(rng, -2, 2);
  return pb.expand_nodes(r);
}

double sample_time(const Problem& pb, std::mt19937_64& rng) { return uniform(rng, 0.0, pb.model().t_final); }

std::string field_summary(const char* name, const Vector& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  return std::string(name) + "_maxabs=" + fmt(mx);
}

struct Tracker {
  CertificationReport* rep;
  void sample(double margin, const std::string& input) {
    ++rep->samples;
    if (rep->samples == 1 || margin < rep->margin) {
      rep->margin = margin;
      rep->worst_case_input = input;
    }
  }
};

double rel_margin(double lhs, double rhs) {
  const double scale = std::max(std::abs(rhs), std::numeric_limits<double>::min());
  return (lhs - rhs) / scale;
}

double sum_weighted_pow(const StaggeredGrid& g, const NodeField& v, double p) {
  double s = 0.0;
  const auto& w = g.gamma2_weights();
  for (int n = 0; n < g.node_count(); ++n) s += w[n] * std::pow(std::abs(v[n]), p);
  return s;
}

}  // namespace

const char* to_string(Lemma lemma) {
  switch (lemma) {
    case Lemma::BoundedP: return "bounded_P";
    case Lemma::BoundedL: return "bounded_L";
    case Lemma::CoerciveP: return "coercive_P";
    case Lemma::CoerciveL: return "coercive_L";
    case Lemma::MonotoneP: return "monotone_P";
    case Lemma::MonotoneL: return "monotone_L";
    case Lemma::LipschitzQuench: return "lipschitz_quench";
    case Lemma::MonotonePsi: return "monotone_psi";
  }
  return "";
}

Lemma parse_lemma(const std::string& name) {
  for (Lemma l : all_lemmas()) {
    if (name == to_string(l)) return l;
  }
  throw config_error("unknown lemma '" + name + "'");
}

std::vector<Lemma> all_lemmas() {
  return {Lemma::BoundedP,  Lemma::BoundedL,  Lemma::CoerciveP,       Lemma::CoerciveL,
          Lemma::MonotoneP, Lemma::MonotoneL, Lemma::LipschitzQuench, Lemma::MonotonePsi};
}

std::string serialize(const CertificationReport& r) {
  std::ostringstream o;
  o << "lemma_id = " << r.lemma_id << "\n";
  o << "samples = " << r.samples << "\n";
  o << "measured_constant = " << fmt(r.measured_constant) << "\n";
  o << "theoretical_bound = " << (r.existence_only ? std::string("existence-only") : fmt(r.theoretical_bound)) << "\n";
  o << "margin = " << fmt(r.margin) << "\n";
  o << "pass = " << (r.pass ? "true" : "false") << "\n";
  o << "worst_case_input = " << r.worst_case_input << "\n";
  for (const auto& [k, v] : r.extra) o << k << " = " << fmt(v) << "\n";
  return o.str();
}

OperatorConstants operator_constants(const Problem& pb) {
  const ModelConfig& c = pb.model();
  const double rf = c.R_alpha * pb.f_sup();
  const double u = pb.U_sup();
  const double inv_tau = 1.0 / c.tau;
  OperatorConstants k{};
  k.C1 = std::max({inv_tau, c.lambda_max(), c.Lambda, rf, u});
  k.C3 = std::max(inv_tau, c.kappa);
  k.C5 = k.C7 = std::min(inv_tau, c.kappa);
  if (rf + u == 0.0) {
    k.eps_young = std::numeric_limits<double>::infinity();
    k.C4_condition = k.C6_condition = inv_tau;
    k.C4 = k.C6 = k.C6_statement = std::min({inv_tau, c.Lambda, c.lambda0});
    return k;
  }
  const double eps = c.lambda0 / (2.0 * (rf + u));
  k.eps_young = eps;
  k.C4_condition = inv_tau - (rf + u) * (rf + u) / (2.0 * c.lambda0);
  k.C6_condition = inv_tau - 9.0 * rf / (16.0 * eps) - u / (4.0 * eps);
  const double slack = c.lambda0 / 2.0;
  k.C4 = std::min({k.C4_condition, c.Lambda, slack});
  k.C6 = std::min({k.C6_condition, c.Lambda, slack});
  k.C6_statement = std::min({inv_tau - rf / (4.0 * eps) - u / (4.0 * eps), c.Lambda, slack});
  return k;
}

CertificationReport certify(Lemma lemma, const Problem& pb, long trials, std::uint64_t seed) {
  if (trials < 1) throw config_error("certify: trials must be >= 1");
  const ModelConfig& c = pb.model();
  const StaggeredGrid& g = pb.grid();
  const OperatorConstants k = operator_constants(pb);
  CertificationReport rep;
  rep.lemma_id = to_string(lemma);
  Tracker track{&rep};
  const std::string stream = rep.lemma_id;

  switch (lemma) {
    case Lemma::BoundedP: {
      rep.theoretical_bound = k.C1;
      double worst = 0.0;
      for (long i = 0; i < trials; ++i) {
        auto rng = make_stream(seed, stream, i);
        const NodeField xi = random_frozen_xi(pb, rng);
        const double t = sample_time(pb, rng);
        const EdgeField B = random_edge_field(pb, rng);
        const double ratio = dual_norm_V(pb, P_functional(pb, xi, t, B)) / norm_V(pb, B);
        worst = std::max(worst, ratio);
        track.sample((k.C1 - ratio) / k.C1, "trial=" + std::to_string(i) + " t=" + fmt(t) + " " + field_summary("B", B));
      }
      rep.measured_constant = worst;
      break;
    }
    case Lemma::BoundedL: {
      rep.theoretical_bound = k.C3;
      double worst = 0.0, c2 = 0.0;
      for (long i = 0; i < trials; ++i) {
        auto rng = make_stream(seed, stream, i);
        const NodeField xi = random_node_field(pb, rng);
        const double ratio = dual_norm_H1(pb, L_linear_functional(pb, xi)) / norm_H1(pb, xi);
        worst = std::max(worst, ratio);
        // Boundary part against Σ_{j≤4} ‖ξ‖^j_{L^j(Γ₂)}.
        double jump2 = 0.0;
        const auto& w = g.gamma2_weights();
        for (int n = 0; n < g.node_count(); ++n) {
          const double pj = psi_jump(xi[n], pb.theta0()[n], c.zeta, c.omega);
          jump2 += w[n] * pj * pj;
        }
        double denom = 0.0;
        for (int j = 1; j <= 4; ++j) denom += sum_weighted_pow(g, xi, j);
        if (denom > 0.0) c2 = std::max(c2, std::sqrt(jump2) / denom);
        track.sample((k.C3 - ratio) / k.C3, "trial=" + std::to_string(i) + " " + field_summary("xi", xi));
      }
      rep.measured_constant = worst;
      rep.extra.push_back({"C2_measured", c2});
      rep.extra.push_back({"C2_bound_existence_only", 1.0});
      break;
    }
    case Lemma::CoerciveP: {
      if (!(k.C4_condition > 0.0)) {
        throw precondition_error("coercive_P: condition 1/tau - (R_alpha*|f| + |U|)^2/(2*lambda0) > 0 violated (value " +
                                 fmt(k.C4_condition) + ")");
      }
      rep.theoretical_bound = k.C4;
      double worst = std::numeric_limits<double>::infinity();
      for (long i = 0; i < trials; ++i) {
        auto rng = make_stream(seed, stream, i);
        const NodeField xi = random_frozen_xi(pb, rng);
        const double t = sample_time(pb, rng);
        const EdgeField B = random_edge_field(pb, rng);
        const double nv = norm_V(pb, B);
        const double q = dot(P_functional(pb, xi, t, B), B) / (nv * nv);
        worst = std::min(worst, q);
        track.sample(rel_margin(q, k.C4), "trial=" + std::to_string(i) + " t=" + fmt(t) + " " + field_summary("B", B));
      }
      rep.measured_constant = worst;
      rep.extra.push_back({"eps_young", k.eps_young});
      break;
    }
    case Lemma::MonotoneP: {
      if (!(k.C6_condition > 0.0)) {
        throw precondition_error(
            "monotone_P: condition 1/tau - 9*R_alpha*|f|/(16*eps) - |U|/(4*eps) > 0 violated (value " +
            fmt(k.C6_condition) + ")");
      }
      rep.theoretical_bound = k.C6;
      double worst = std::numeric_limits<double>::infinity();
      for (long i = 0; i < trials; ++i) {
        auto rng = make_stream(seed, stream, i);
        const NodeField xi = random_frozen_xi(pb, rng);
        const double t = sample_time(pb, rng);
        const EdgeField A = random_edge_field(pb, rng);
        const EdgeField B = random_edge_field(pb, rng);
        EdgeField diff = B;
        axpy(-1.0, A, diff);
        EdgeField dP = P_functional(pb, xi, t, B);
        axpy(-1.0, P_functional(pb, xi, t, A), dP);
        const double nv = norm_V(pb, diff);
        const double q = dot(dP, diff) / (nv * nv);
        worst = std::min(worst, q);
        track.sample(rel_margin(q, k.C6), "trial=" + std::to_string(i) + " t=" + fmt(t) + " " + field_summary("A", A) +
                                              " " + field_summary("B", B));
      }
      rep.measured_constant = worst;
      rep.extra.push_back({"C6_statement_form", k.C6_statement});
      rep.extra.push_back({"eps_young", k.eps_young});
      break;
    }
    case Lemma::CoerciveL:
    case Lemma::MonotoneL: {
      const bool mono = lemma == Lemma::MonotoneL;
      rep.theoretical_bound = mono ? k.C7 : k.C5;
      double worst = std::numeric_limits<double>::infinity();
      for (long i = 0; i < trials; ++i) {
        auto rng = make_stream(seed, stream, i);
        const NodeField v = random_node_field(pb, rng);
        NodeField w(g.node_count(), 0.0);
        if (mono) w = random_node_field(pb, rng);
        NodeField diff = v;
        axpy(-1.0, w, diff);
        NodeField dL = L_functional(pb, v);
        if (mono) axpy(-1.0, L_functional(pb, w), dL);
        const double lhs = dot(dL, diff);
        const double h1 = norm_H1(pb, diff);
        double rhs = rep.theoretical_bound * h1 * h1 + c.zeta / 8.0 * sum_weighted_pow(g, diff, 5.0);
        if (mono) rhs += c.omega * sum_weighted_pow(g, diff, 2.0);
        worst = std::min(worst, (lhs - (rhs - rep.theoretical_bound * h1 * h1)) / (h1 * h1));
        track.sample(rel_margin(lhs, rhs), "trial=" + std::to_string(i) + " " + field_summary("v", v) +
                                               (mono ? " " + field_summary("w", w) : std::string()));
      }
      rep.measured_constant = worst;
      break;
    }
    case Lemma::LipschitzQuench: {
      rep.theoretical_bound = 2.25;
      double worst = 0.0;
      for (long b = 0; b * kScalarBlock < trials; ++b) {
        auto rng = make_stream(seed, stream, b);
        const long end = std::min(trials, (b + 1) * kScalarBlock);
        for (long i = b * kScalarBlock; i < end; ++i) {
          const Vec3 a = random_vec(rng);
          const Vec3 bb = random_vec(rng);
          const double gamma = log_uniform(rng, 1e-2, 1e2);
          const auto [lhs, rhs] = quench_lipschitz_gap(a, bb, gamma);
          const double dist = norm(bb - a);
          if (dist > 0.0) worst = std::max(worst, lhs / dist);
          const double margin = rel_margin(rhs, lhs);
          ++rep.samples;
          if (rep.samples == 1 || margin < rep.margin) {
            rep.margin = margin;
            rep.worst_case_input = "a=(" + fmt(a[0]) + "," + fmt(a[1]) + "," + fmt(a[2]) + ") b=(" + fmt(bb[0]) + "," +
                                   fmt(bb[1]) + "," + fmt(bb[2]) + ") gamma=" + fmt(gamma);
          }
        }
      }
      rep.measured_constant = worst;
      break;
    }
    case Lemma::MonotonePsi: {
      rep.theoretical_bound = 0.125;
      double worst = std::numeric_limits<double>::infinity();
      for (long b = 0; b * kScalarBlock < trials; ++b) {
        auto rng = make_stream(seed, stream, b);
        const long end = std::min(trials, (b + 1) * kScalarBlock);
        for (long i = b * kScalarBlock; i < end; ++i) {
          const double x = amplitude(rng) * uniform(rng, -1, 1);
          const double y = amplitude(rng) * uniform(rng, -1, 1);
          const double d = std::abs(x - y);
          const double lhs = (psi(x, c.zeta, c.omega) - psi(y, c.zeta, c.omega)) * (x - y);
          const double rhs = c.zeta / 8.0 * std::pow(d, 5) + c.omega * d * d;
          if (c.zeta > 0.0 && d > 0.0) worst = std::min(worst, (lhs - c.omega * d * d) / (c.zeta * std::pow(d, 5)));
          const double margin = rel_margin(lhs, rhs);
          ++rep.samples;
          if (rep.samples == 1 || margin < rep.margin) {
            rep.margin = margin;
            rep.worst_case_input = "a=" + fmt(x) + " b=" + fmt(y);
          }
        }
      }
      // Sign-symmetric pairs attain equality.
      double sharp = 0.0;
      for (double a : {1e-2, 0.3, 1.0, 7.5, 1e2}) {
        const double lhs = (psi(a, c.zeta, c.omega) - psi(-a, c.zeta, c.omega)) * (2.0 * a);
        const double rhs = c.zeta / 8.0 * std::pow(2.0 * a, 5) + c.omega * 4.0 * a * a;
        sharp = std::max(sharp, std::abs(lhs - rhs) / rhs);
      }
      // Smallest observed (ψ(a)−ψ(b))(a−b) − ω|a−b|² over ζ|a−b|⁵; the bound is 1/8.
      rep.measured_constant = c.zeta > 0.0 ? worst : 0.0;
      rep.extra.push_back({"sharpness_rel_error", sharp});
      rep.pass = rep.margin >= kMarginTolerance && sharp <= 1e-12;
      return rep;
    }
  }
  rep.pass = rep.margin >= kMarginTolerance;
  return rep;
}

}  // namespace mheat
