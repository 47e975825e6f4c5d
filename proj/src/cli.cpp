#include "mheat/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "mheat/certify.hpp"
#include "mheat/config.hpp"
#include "mheat/mms.hpp"
#include "mheat/output.hpp"
#include "mheat/rothe.hpp"
#include "mheat/studies.hpp"

namespace mheat {

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

RunManifest load(const CommonArgs& args) {
  RunManifest m = parse_config(args.config);
  if (args.seed) m.study.seed = *args.seed;
  if (args.out) m.output.dir = *args.out;
  validate(m);
  return m;
}

std::string out_path(const RunManifest& m, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(m.output.dir, ec);
  if (ec) throw io_error("cannot create output directory '" + m.output.dir + "': " + ec.message());
  return (std::filesystem::path(m.output.dir) / name).string();
}

int cmd_run(const RunManifest& m) {
  const StaggeredGrid grid = make_grid(m.domain);
  const Problem pb(grid, m.model, m.solver);
  RunOptions opt;
  opt.snapshot_times = m.output.snapshot_times;
  const RunResult r = run(pb, opt);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  write_diagnostics_csv(out_path(m, "diagnostics.csv"), r.diagnostics, m.output.csv_every);
  for (const Snapshot& s : r.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06ld.txt", std::lround(s.t / m.model.tau));
    write_snapshot(out_path(m, name), grid, s.B, s.xi, s.t);
  }
  if (!r.ok()) {
    std::cerr << "error: " << *r.error << " (after " << r.diagnostics.size() << " steps)\n";
    return exit_code_for(r.error_kind);
  }
  std::cout << "steps " << r.diagnostics.size() << "  max_source " << format_double(r.max_source)
            << "  bound q_max/eps " << format_double(m.model.q_max() / m.model.epsilon) << '\n';
  return kExitOk;
}

int cmd_verify(const RunManifest& m) {
  const StaggeredGrid grid = make_grid(m.domain);
  const Problem pb(grid, m.model, m.solver);
  std::vector<CertificationReport> reports;
  bool all = true;
  for (Lemma lemma : all_lemmas()) {
    const bool scalar = lemma == Lemma::LipschitzQuench || lemma == Lemma::MonotonePsi;
    CertificationReport rep;
    try {
      rep = certify(lemma, pb, scalar ? m.study.scalar_trials : m.study.trials, m.study.seed);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Precondition) throw;
      rep.lemma_id = to_string(lemma);
      rep.pass = false;
      rep.worst_case_input = std::string("precondition failed: ") + e.what();
    }
    all = all && rep.pass;
    std::cout << serialize(rep) << '\n';
    reports.push_back(std::move(rep));
  }
  write_certification(out_path(m, "certification.txt"), reports);
  return all ? kExitOk : kExitCheck;
}

int cmd_sweep_eps(const RunManifest& m) {
  const StaggeredGrid grid = make_grid(m.domain);
  const EpsSweep sw = epsilon_sweep(grid, m.model, m.solver, m.study.eps_list);
  write_eps_sweep_csv(out_path(m, "eps_sweep.csv"), sw);
  for (const EpsRow& r : sw.rows) {
    std::cout << "eps " << format_double(r.epsilon) << "  residual " << format_double(r.cutoff_residual_L1)
              << "  ratio " << format_double(r.residual_ratio) << "  diff " << format_double(r.solution_diff)
              << '\n';
  }
  std::cout << "residual decreasing: " << (sw.residual_decreasing ? "yes" : "no")
            << "  solution difference decreasing: " << (sw.solution_diff_decreasing ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_converge_tau(const RunManifest& m) {
  const StaggeredGrid grid = make_grid(m.domain);
  std::vector<double> taus = m.study.tau_list;
  if (taus.empty()) {
    for (int k : {8, 16, 32, 64}) taus.push_back(m.model.t_final / k);
  }
  const TauStudy st = tau_convergence_study(grid, m.model, m.solver, taus);
  write_tau_study_csv(out_path(m, "tau_convergence.csv"), st);
  for (const TauStudyRow& r : st.rows) {
    std::cout << "tau " << format_double(r.tau) << "  diff_B " << format_double(r.diff_B) << "  diff_xi "
              << format_double(r.diff_xi) << "  order_B " << format_double(r.order_B) << '\n';
  }
  std::cout << "monotone: " << (st.monotone ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_uniq(const RunManifest& m) {
  const StaggeredGrid grid = make_grid(m.domain);
  const UniquenessReport rep = uniqueness_experiment(grid, m.model, m.solver, m.study.delta_list, m.study.seed);
  write_uniqueness_csv(out_path(m, "uniqueness.csv"), rep);
  for (const UniquenessSeries& s : rep.series) {
    std::cout << "delta " << format_double(s.delta) << "  E(0) " << format_double(s.E.front()) << "  E(T) "
              << format_double(s.E.back()) << "  C_hat " << format_double(s.C_hat) << "  sobolev_ratio "
              << format_double(s.sobolev_ratio_max) << '\n';
  }
  for (double r : rep.quadratic_ratios) std::cout << "ratio " << format_double(r) << '\n';
  std::cout << "C_hat spread " << format_double(rep.C_hat_spread) << "  pass " << (rep.pass ? "yes" : "no") << '\n';
  return rep.pass ? kExitOk : kExitCheck;
}

int cmd_mms(const RunManifest& m) {
  MmsOptions opt;
  const int n = m.domain.cells[0];
  opt.temporal_cells = n;
  opt.temporal_T = m.model.t_final;
  const int base = std::max(2, n / 2);
  opt.spatial_cells = {base, 2 * base, 4 * base, 8 * base};
  const MmsReport rep = mms_verify(m.domain, m.model, m.solver, opt);
  write_mms_csv(out_path(m, "mms.csv"), rep);
  for (const MmsLevel& l : rep.temporal) {
    std::cout << "temporal tau " << format_double(l.size) << "  err_B " << format_double(l.err_B) << "  err_xi "
              << format_double(l.err_xi) << '\n';
  }
  for (const MmsLevel& l : rep.spatial) {
    std::cout << "spatial h " << format_double(l.size) << "  err_B " << format_double(l.err_B) << "  err_xi "
              << format_double(l.err_xi) << '\n';
  }
  std::cout << "order temporal B " << format_double(rep.order_t_B) << " xi " << format_double(rep.order_t_xi)
            << "\norder spatial B " << format_double(rep.order_s_B) << " xi " << format_double(rep.order_s_xi)
            << '\n';
  return rep.pass() ? kExitOk : kExitCheck;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Grid: return kExitConfig;
    case ErrorKind::Solver:
    case ErrorKind::Run:
    case ErrorKind::Operator: return kExitSolver;
    case ErrorKind::Precondition: return kExitCheck;
    case ErrorKind::Io: return kExitOther;
  }
  return kExitOther;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Rothe solver for the magneto-heating model and its verification studies", "mheat"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunManifest&);
  };
  const Entry entries[] = {
      {"run", "single simulation: diagnostics CSV and snapshots", cmd_run},
      {"verify", "certify the operator and scalar inequalities", cmd_verify},
      {"sweep-eps", "cut-off parameter sweep", cmd_sweep_eps},
      {"converge-tau", "time-step Cauchy study", cmd_converge_tau},
      {"uniq", "twin-run Gronwall uniqueness experiment", cmd_uniq},
      {"mms", "manufactured-solution order verification", cmd_mms},
  };

  CommonArgs args;
  std::uint64_t seed = 0;
  std::string out;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", args.config, "configuration file")->required();
    sub->add_option("--seed", seed, "overrides study.seed");
    sub->add_option("--out", out, "overrides output.dir");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const Entry& e : entries) {
    CLI::App* sub = app.get_subcommand(e.name);
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) args.seed = seed;
    if (sub->count("--out")) args.out = out;
    try {
      const RunManifest m = load(args);
      return e.fn(m);
    } catch (const Error& err) {
      std::cerr << "error: " << err.what() << '\n';
      return exit_code_for(err.kind());
    } catch (const std::exception& err) {
      std::cerr << "error: " << err.what() << '\n';
      return kExitOther;
    }
  }
  return kExitConfig;
}

}  // namespace mheat
