#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mheat/rothe.hpp"

namespace mheat {

enum class Lemma {
  BoundedP,
  BoundedL,
  CoerciveP,
  CoerciveL,
  MonotoneP,
  MonotoneL,
  LipschitzQuench,
  MonotonePsi
};

const char* to_string(Lemma lemma);
Lemma parse_lemma(const std::string& name);
std::vector<Lemma> all_lemmas();

struct CertificationReport {
  std::string lemma_id;
  long samples = 0;
  double measured_constant = 0.0;
  double theoretical_bound = 0.0;
  bool existence_only = false;
  double margin = 0.0;  // smallest relative margin over all samples
  bool pass = false;
  std::string worst_case_input;
  std::vector<std::pair<std::string, double>> extra;
};

// Flat "key = value" block.
std::string serialize(const CertificationReport& report);

// Relative margin below which a sample counts as a violation.
constexpr double kMarginTolerance = -1e-10;

// `trials` random samples; callers pass the larger scalar count for the two
// scalar lemmas.
// Deterministic in `seed`. Throws a Precondition error when τ violates the
// positivity condition behind the constant.
CertificationReport certify(Lemma lemma, const Problem& pb, long trials, std::uint64_t seed);

// Constants of the coercivity and monotonicity bounds.
struct OperatorConstants {
  double eps_young;    // ε₁ = ε₂ = λ₀ / (2(R_α‖f‖ + ‖U‖))
  double C1, C3, C4, C5, C6, C6_statement, C7;
  double C4_condition;  // 1/τ − (R_α‖f‖+‖U‖)²/(2λ₀)
  double C6_condition;  // 1/τ − 9R_α‖f‖/(16ε) − ‖U‖/(4ε)
};
OperatorConstants operator_constants(const Problem& pb);

}  // namespace mheat
