#include "mheat/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mheat/error.hpp"
#include "mheat/presets.hpp"

namespace mheat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw config_error(key + ": cannot parse number '" + t + "'");
  }
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw config_error(key + ": expected an integer, got '" + trim(text) + "'");
  return static_cast<long>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

using Setter = std::function<void(RunManifest&, const std::string&)>;

struct KeyInfo {
  Setter set;
  bool mandatory = false;
};

std::map<std::string, KeyInfo> key_table() {
  std::map<std::string, KeyInfo> k;
  auto model_num = [&](const char* key, double ModelConfig::*field) {
    k[std::string("model.") + key] = {[=](RunManifest& m, const std::string& v) {
      m.model.*field = parse_double(key, v);
    }};
  };
  auto preset = [&](const char* key, Preset ModelConfig::*field) {
    k[std::string("model.") + key] = {[=](RunManifest& m, const std::string& v) { m.model.*field = Preset::parse(v); }};
  };

  for (int a = 0; a < 3; ++a) {
    const std::string lk = std::string("l") + "xyz"[a];
    const std::string nk = std::string("n") + "xyz"[a];
    k["domain." + lk] = {[=](RunManifest& m, const std::string& v) { m.domain.extents[a] = parse_double(lk, v); }};
    k["domain." + nk] = {[=](RunManifest& m, const std::string& v) {
                           m.domain.cells[a] = static_cast<int>(parse_long(nk, v));
                         },
                         true};
  }
  k["domain.gamma1_faces"] = {[](RunManifest& m, const std::string& v) { m.domain.gamma1 = BoxFaceSet::parse(v); }};
  k["time.t_final"] = {[](RunManifest& m, const std::string& v) { m.model.t_final = parse_double("t_final", v); }, true};
  k["time.tau"] = {[](RunManifest& m, const std::string& v) { m.model.tau = parse_double("tau", v); }, true};

  model_num("lambda0", &ModelConfig::lambda0);
  model_num("lambda1", &ModelConfig::lambda1);
  model_num("Lambda", &ModelConfig::Lambda);
  model_num("R_alpha", &ModelConfig::R_alpha);
  model_num("gamma", &ModelConfig::gamma);
  model_num("kappa", &ModelConfig::kappa);
  model_num("zeta", &ModelConfig::zeta);
  model_num("omega", &ModelConfig::omega);
  model_num("epsilon", &ModelConfig::epsilon);
  model_num("q0", &ModelConfig::q0);
  model_num("q1", &ModelConfig::q1);
  preset("theta0_preset", &ModelConfig::theta0_preset);
  preset("f_preset", &ModelConfig::f_preset);
  preset("U_preset", &ModelConfig::U_preset);
  preset("B0_preset", &ModelConfig::B0_preset);
  k["model.cutoff_mode"] = {[](RunManifest& m, const std::string& v) {
    const std::string t = trim(v);
    if (t == "product") m.model.cutoff_mode = CutoffMode::Product;
    else if (t == "source_only") m.model.cutoff_mode = CutoffMode::SourceOnly;
    else throw config_error("cutoff_mode: expected product or source_only, got '" + t + "'");
  }};
  k["model.magnetic_bc"] = {[](RunManifest& m, const std::string& v) {
    const std::string t = trim(v);
    if (t == "essential") m.model.magnetic_bc = MagneticBc::Essential;
    else if (t == "natural") m.model.magnetic_bc = MagneticBc::Natural;
    else throw config_error("magnetic_bc: expected essential or natural, got '" + t + "'");
  }};

  k["solver.tol_lin"] = {[](RunManifest& m, const std::string& v) { m.solver.tol_lin = parse_double("tol_lin", v); }};
  k["solver.tol_newton"] = {[](RunManifest& m, const std::string& v) {
    m.solver.tol_newton = parse_double("tol_newton", v);
  }};
  k["solver.max_iter"] = {[](RunManifest& m, const std::string& v) {
    m.solver.max_iter = static_cast<int>(parse_long("max_iter", v));
  }};

  k["output.dir"] = {[](RunManifest& m, const std::string& v) { m.output.dir = trim(v); }};
  k["output.csv_every"] = {[](RunManifest& m, const std::string& v) {
    m.output.csv_every = static_cast<int>(parse_long("csv_every", v));
  }};
  k["output.snapshot_times"] = {[](RunManifest& m, const std::string& v) {
    m.output.snapshot_times = parse_list("snapshot_times", v);
  }};

  k["study.tau_list"] = {[](RunManifest& m, const std::string& v) { m.study.tau_list = parse_list("tau_list", v); }};
  k["study.eps_list"] = {[](RunManifest& m, const std::string& v) { m.study.eps_list = parse_list("eps_list", v); }};
  k["study.delta_list"] = {[](RunManifest& m, const std::string& v) {
    m.study.delta_list = parse_list("delta_list", v);
  }};
  k["study.trials"] = {[](RunManifest& m, const std::string& v) {
    m.study.trials = static_cast<int>(parse_long("trials", v));
  }};
  k["study.scalar_trials"] = {[](RunManifest& m, const std::string& v) {
    m.study.scalar_trials = parse_long("scalar_trials", v);
  }};
  k["study.seed"] = {[](RunManifest& m, const std::string& v) {
    const long s = parse_long("seed", v);
    if (s < 0) throw config_error("seed: must be >= 0");
    m.study.seed = static_cast<std::uint64_t>(s);
  }};
  return k;
}

void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw config_error(key + ": " + constraint);
}

}  // namespace

double Preset::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Preset Preset::parse(const std::string& text) {
  std::istringstream in(text);
  Preset p;
  if (!(in >> p.name)) throw config_error("preset: empty preset specification");
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("preset " + p.name + ": expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    if (p.params.count(key)) throw config_error("preset " + p.name + ": duplicate parameter '" + key + "'");
    p.params[key] = parse_double(key, tok.substr(eq + 1));
  }
  return p;
}

std::string Preset::to_string() const {
  std::string s = name;
  for (const auto& [k, v] : params) s += " " + k + "=" + fmt(v);
  return s;
}

RunManifest parse_config_text(const std::string& text) {
  const auto table = key_table();
  RunManifest m;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "time" && section != "model" && section != "solver" &&
          section != "output" && section != "study") {
        throw config_error("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw config_error("line " + std::to_string(line_no) + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section + "." + key;
    auto it = table.find(full);
    if (it == table.end()) throw config_error("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(full).second) throw config_error("duplicate key '" + key + "' in [" + section + "]");
    it->second.set(m, trim(line.substr(eq + 1)));
  }
  for (const auto& [full, info] : table) {
    if (info.mandatory && !seen.count(full)) {
      throw config_error("missing mandatory key '" + full.substr(full.find('.') + 1) + "' in [" +
                         full.substr(0, full.find('.')) + "]");
    }
  }
  validate(m);
  return m;
}

RunManifest parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "config", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_model(const ModelConfig& c) {
  require(c.lambda0 > 0.0, "lambda0", "must be > 0 (0 < lambda0 <= lambda(theta))");
  require(c.lambda1 >= 0.0, "lambda1", "must be >= 0 (lambda bounded by lambda0 + lambda1)");
  require(c.Lambda >= 0.0, "Lambda", "must be >= 0");
  require(c.R_alpha >= 0.0, "R_alpha", "must be >= 0");
  require(c.gamma > 0.0, "gamma", "must be > 0");
  require(c.kappa > 0.0, "kappa", "must be > 0 (kappa >= kappa_min > 0)");
  require(c.zeta >= 0.0, "zeta", "must be >= 0");
  require(c.omega >= 0.0, "omega", "must be >= 0");
  require(c.epsilon > 0.0 && c.epsilon < 1.0, "epsilon", "must lie in (0, 1)");
  require(c.q0 > 0.0, "q0", "must be > 0 (q bounded below by q0)");
  require(c.q1 >= 0.0, "q1", "must be >= 0");
  require(c.tau > 0.0, "tau", "must be > 0");
  require(c.t_final > 0.0, "t_final", "must be > 0");
  require(c.tau <= c.t_final * (1.0 + 1e-12), "tau", "must not exceed t_final");
  validate_preset(PresetKind::Theta0, c.theta0_preset);
  validate_preset(PresetKind::F, c.f_preset);
  validate_preset(PresetKind::U, c.U_preset);
  validate_preset(PresetKind::B0, c.B0_preset);
  if (c.theta0_preset.name == "constant") {
    require(c.theta0_preset.get("value", 1.0) > 0.0, "theta0_preset", "theta0 must be >= theta_min > 0");
  } else {
    const double base = c.theta0_preset.get("base", 1.0);
    const double top = base + c.theta0_preset.get("slope", 0.5);
    require(base > 0.0 && top > 0.0, "theta0_preset", "theta0 must be >= theta_min > 0 on the whole box");
  }
}

void validate(const RunManifest& m) {
  for (int a = 0; a < 3; ++a) {
    const std::string ax(1, "xyz"[a]);
    require(m.domain.extents[a] > 0.0, "l" + ax, "must be > 0");
    require(m.domain.cells[a] >= 2, "n" + ax, "must be >= 2");
  }
  require(!m.domain.gamma1.empty(), "gamma1_faces", "must name at least one face (Dirichlet boundary nonempty)");
  require(!m.domain.gamma1.full(), "gamma1_faces", "must leave at least one face for the radiation boundary");
  validate_model(m.model);
  require(m.solver.tol_lin > 0.0, "tol_lin", "must be > 0");
  require(m.solver.tol_newton > 0.0, "tol_newton", "must be > 0");
  require(m.solver.max_iter >= 1, "max_iter", "must be >= 1");
  require(!m.output.dir.empty(), "dir", "must not be empty");
  require(m.output.csv_every >= 1, "csv_every", "must be >= 1");
  for (double t : m.output.snapshot_times) {
    require(t >= 0.0 && t <= m.model.t_final * (1.0 + 1e-12), "snapshot_times", "must lie in [0, t_final]");
  }
  for (double t : m.study.tau_list) require(t > 0.0, "tau_list", "entries must be > 0");
  for (double e : m.study.eps_list) require(e > 0.0 && e < 1.0, "eps_list", "entries must lie in (0, 1)");
  for (double d : m.study.delta_list) require(d >= 0.0, "delta_list", "entries must be >= 0");
  require(m.study.trials >= 1, "trials", "must be >= 1");
  require(m.study.scalar_trials >= 1, "scalar_trials", "must be >= 1");
}

std::string serialize(const RunManifest& m) {
  std::ostringstream o;
  const auto& d = m.domain;
  const auto& c = m.model;
  o << "[domain]\n";
  o << "lx = " << fmt(d.extents[0]) << "\nly = " << fmt(d.extents[1]) << "\nlz = " << fmt(d.extents[2]) << "\n";
  o << "nx = " << d.cells[0] << "\nny = " << d.cells[1] << "\nnz = " << d.cells[2] << "\n";
  o << "gamma1_faces = " << d.gamma1.to_string() << "\n\n";
  o << "[time]\nt_final = " << fmt(c.t_final) << "\ntau = " << fmt(c.tau) << "\n\n";
  o << "[model]\n";
  o << "lambda0 = " << fmt(c.lambda0) << "\nlambda1 = " << fmt(c.lambda1) << "\nLambda = " << fmt(c.Lambda)
    << "\nR_alpha = " << fmt(c.R_alpha) << "\ngamma = " << fmt(c.gamma) << "\nkappa = " << fmt(c.kappa)
    << "\nzeta = " << fmt(c.zeta) << "\nomega = " << fmt(c.omega) << "\nepsilon = " << fmt(c.epsilon)
    << "\nq0 = " << fmt(c.q0) << "\nq1 = " << fmt(c.q1) << "\n";
  o << "theta0_preset = " << c.theta0_preset.to_string() << "\nf_preset = " << c.f_preset.to_string()
    << "\nU_preset = " << c.U_preset.to_string() << "\nB0_preset = " << c.B0_preset.to_string() << "\n";
  o << "cutoff_mode = " << (c.cutoff_mode == CutoffMode::Product ? "product" : "source_only") << "\n";
  o << "magnetic_bc = " << (c.magnetic_bc == MagneticBc::Essential ? "essential" : "natural") << "\n\n";
  o << "[solver]\ntol_lin = " << fmt(m.solver.tol_lin) << "\ntol_newton = " << fmt(m.solver.tol_newton)
    << "\nmax_iter = " << m.solver.max_iter << "\n\n";
  o << "[output]\ndir = " << m.output.dir << "\ncsv_every = " << m.output.csv_every
    << "\nsnapshot_times = " << join(m.output.snapshot_times) << "\n\n";
  o << "[study]\ntau_list = " << join(m.study.tau_list) << "\neps_list = " << join(m.study.eps_list)
    << "\ndelta_list = " << join(m.study.delta_list) << "\ntrials = " << m.study.trials
    << "\nscalar_trials = " << m.study.scalar_trials << "\nseed = " << m.study.seed << "\n";
  return o.str();
}

StaggeredGrid make_grid(const GridSpec& spec) { return build_grid(spec.extents, spec.cells, spec.gamma1); }

int step_count(const ModelConfig& model, bool* exact) {
  const double ratio = model.t_final / model.tau;
  const double rounded = std::round(ratio);
  const bool is_exact = std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio);
  if (exact) *exact = is_exact;
  return static_cast<int>(is_exact ? rounded : std::floor(ratio));
}

}  // namespace mheat
