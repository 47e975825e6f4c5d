#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mheat/grid.hpp"
#include "mheat/vec3.hpp"

namespace mheat {

// Catalog entry written as "name key=value key=value".
struct Preset {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const;
  static Preset parse(const std::string& text);
  std::string to_string() const;
  bool operator==(const Preset&) const = default;
};

enum class CutoffMode { Product, SourceOnly };
enum class MagneticBc { Essential, Natural };

struct ModelConfig {
  double lambda0 = 1.0;
  double lambda1 = 0.5;
  double Lambda = 1.0;
  double R_alpha = 1.0;
  double gamma = 1.0;
  double kappa = 1.0;
  double zeta = 1.0;
  double omega = 1.0;
  double epsilon = 0.01;
  double q0 = 1.0;
  double q1 = 0.5;
  double tau = 0.0;
  double t_final = 0.0;
  Preset theta0_preset{"constant", {}};
  Preset f_preset{"gaussian_blob", {}};
  Preset U_preset{"solid_rotation", {}};
  Preset B0_preset{"divfree_vortex", {}};
  CutoffMode cutoff_mode = CutoffMode::Product;
  MagneticBc magnetic_bc = MagneticBc::Essential;

  double lambda_max() const { return lambda0 + lambda1; }
  double q_max() const { return q0 + q1; }
  bool operator==(const ModelConfig&) const = default;
};

struct GridSpec {
  Vec3 extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{0, 0, 0};
  BoxFaceSet gamma1{BoxFace::ZMinus};
  bool operator==(const GridSpec&) const = default;
};

struct SolverSettings {
  double tol_lin = 1e-10;
  double tol_newton = 1e-10;
  int max_iter = 20000;
  bool operator==(const SolverSettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  int csv_every = 1;
  std::vector<double> snapshot_times;
  bool operator==(const OutputSettings&) const = default;
};

struct StudySettings {
  std::vector<double> tau_list;
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> delta_list{1e-3, 5e-4, 2.5e-4};
  int trials = 100;
  long scalar_trials = 1000000;
  std::uint64_t seed = 1;
  bool operator==(const StudySettings&) const = default;
};

struct RunManifest {
  GridSpec domain;
  ModelConfig model;
  SolverSettings solver;
  OutputSettings output;
  StudySettings study;
  bool operator==(const RunManifest&) const = default;
};

RunManifest parse_config(const std::string& path);
RunManifest parse_config_text(const std::string& text);
std::string serialize(const RunManifest& manifest);

// Throws config_error naming the offending key.
void validate(const RunManifest& manifest);
void validate_model(const ModelConfig& model);

StaggeredGrid make_grid(const GridSpec& spec);

// Number of steps for t_final/tau; `exact` is false when t_final is not a multiple of tau.
int step_count(const ModelConfig& model, bool* exact = nullptr);

}  // namespace mheat
