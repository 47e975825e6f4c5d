#include "mheat/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mheat/error.hpp"

namespace mheat {

namespace {

constexpr const char* kOrdering = "lexicographic by direction,k,j,i";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error("write to '" + path + "' failed");
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{
      "step",          "t",          "norm_B_L2",      "norm_curlB_L2",  "norm_divB_L2", "lemma6_lhs",
      "norm_xi_L2",    "norm_xi_L1", "norm_grad_xi_L2", "norm_xi_L4_G2", "norm_xi_L5_G2", "lemma7_lhs",
      "weighted_grad", "lq_1",       "lq_1p1",         "lq_1p2",         "joule_total",  "lin_iters",
      "newton_iters"};
  return cols;
}

void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostics>& rows, int every) {
  if (every < 1) throw io_error("csv_every must be >= 1");
  std::ofstream out = open_out(path);
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const StepDiagnostics& d : rows) {
    if (d.step % every != 0) continue;
    out << d.step;
    for (double v : {d.t, d.norm_B_L2, d.norm_curlB_L2, d.norm_divB_L2, d.lemma6_lhs, d.norm_xi_L2, d.norm_xi_L1,
                     d.norm_grad_xi_L2, d.norm_xi_L4_G2, d.norm_xi_L5_G2, d.lemma7_lhs, d.weighted_grad, d.lq_1,
                     d.lq_1p1, d.lq_1p2, d.joule_total}) {
      out << ',' << format_double(v);
    }
    out << ',' << d.lin_iters << ',' << d.newton_iters << '\n';
  }
  finish(out, path);
}

void write_snapshot(const std::string& path, const StaggeredGrid& grid, const EdgeField& B, const NodeField& xi,
                    double t) {
  if (static_cast<int>(B.size()) != grid.edge_count() || static_cast<int>(xi.size()) != grid.node_count()) {
    throw io_error("snapshot '" + path + "': field sizes do not match the grid");
  }
  std::ofstream out = open_out(path);
  const auto& c = grid.cells();
  const auto& h = grid.spacing();
  out << "# mheat snapshot\n";
  out << "cells " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "spacing " << format_double(h[0]) << ' ' << format_double(h[1]) << ' ' << format_double(h[2]) << '\n';
  out << "t " << format_double(t) << '\n';
  out << "ordering " << kOrdering << '\n';
  out << "node_count " << grid.node_count() << '\n';
  out << "edge_count " << grid.edge_count() << '\n';
  out << "field B edges " << B.size() << '\n';
  for (double v : B) out << format_double(v) << '\n';
  out << "field xi nodes " << xi.size() << '\n';
  for (double v : xi) out << format_double(v) << '\n';
  finish(out, path);
}

SnapshotFile read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  SnapshotFile s;
  auto fail = [&](const std::string& what) { return io_error("snapshot '" + path + "': " + what); };
  auto expect = [&](const std::string& key) {
    std::string k;
    if (!(in >> k) || k != key) throw fail("expected '" + key + "'");
  };
  std::string line;
  std::getline(in, line);
  if (line != "# mheat snapshot") throw fail("missing header line");
  expect("cells");
  in >> s.cells[0] >> s.cells[1] >> s.cells[2];
  expect("spacing");
  in >> s.spacing[0] >> s.spacing[1] >> s.spacing[2];
  expect("t");
  in >> s.t;
  expect("ordering");
  std::getline(in, line);
  if (line != std::string(" ") + kOrdering) throw fail("unknown ordering '" + line + "'");
  long node_count = 0, edge_count = 0;
  expect("node_count");
  in >> node_count;
  expect("edge_count");
  in >> edge_count;
  auto read_field = [&](const std::string& name, const std::string& kind, long expected, Vector& v) {
    expect("field");
    expect(name);
    expect(kind);
    long n = -1;
    in >> n;
    if (n != expected) throw fail("field " + name + " count does not match the header");
    v.resize(n);
    for (long i = 0; i < n; ++i) {
      if (!(in >> v[i])) throw fail("truncated field " + name);
    }
  };
  read_field("B", "edges", edge_count, s.B);
  read_field("xi", "nodes", node_count, s.xi);
  if (!in) throw fail("malformed file");
  return s;
}

void write_certification(const std::string& path, const std::vector<CertificationReport>& reports) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) out << '\n';
    out << serialize(reports[i]);
  }
  finish(out, path);
}

void write_eps_sweep_csv(const std::string& path, const EpsSweep& sweep) {
  std::ofstream out = open_out(path);
  out << "epsilon,cutoff_residual_L1,cutoff_bound_L1,residual_ratio,solution_diff,lemma7_lhs,max_source\n";
  for (const EpsRow& r : sweep.rows) {
    write_row(out, {r.epsilon, r.cutoff_residual_L1, r.cutoff_bound_L1, r.residual_ratio, r.solution_diff,
                    r.lemma7_lhs, r.max_source});
  }
  finish(out, path);
}

void write_tau_study_csv(const std::string& path, const TauStudy& study) {
  std::ofstream out = open_out(path);
  out << "tau,diff_B,diff_xi,order_B,order_xi,interp_gap_B\n";
  for (const TauStudyRow& r : study.rows) {
    write_row(out, {r.tau, r.diff_B, r.diff_xi, r.order_B, r.order_xi, r.interp_gap_B});
  }
  finish(out, path);
}

void write_uniqueness_csv(const std::string& path, const UniquenessReport& report) {
  std::ofstream out = open_out(path);
  out << "delta,t,E,C_hat,bound\n";
  for (const UniquenessSeries& s : report.series) {
    const double E0 = s.E.empty() ? 0.0 : s.E.front();
    for (std::size_t n = 0; n < s.t.size(); ++n) {
      write_row(out, {s.delta, s.t[n], s.E[n], s.C_hat, E0 * std::exp(s.C_hat * s.t[n])});
    }
  }
  finish(out, path);
}

void write_mms_csv(const std::string& path, const MmsReport& report) {
  std::ofstream out = open_out(path);
  out << "study,size,err_B,err_xi,iterations\n";
  auto rows = [&](const char* name, const std::vector<MmsLevel>& levels) {
    for (const MmsLevel& l : levels) {
      out << name << ',' << format_double(l.size) << ',' << format_double(l.err_B) << ','
          << format_double(l.err_xi) << ',' << l.iterations << '\n';
    }
  };
  rows("temporal", report.temporal);
  rows("spatial", report.spatial);
  out << "order_temporal,," << format_double(report.order_t_B) << ',' << format_double(report.order_t_xi) << ",\n";
  out << "order_spatial,," << format_double(report.order_s_B) << ',' << format_double(report.order_s_xi) << ",\n";
  finish(out, path);
}

}  // namespace mheat
