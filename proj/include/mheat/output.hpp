#pragma once

#include <string>
#include <vector>

#include "mheat/certify.hpp"
#include "mheat/mms.hpp"
#include "mheat/rothe.hpp"
#include "mheat/studies.hpp"

namespace mheat {

// Fixed column list of the diagnostics CSV.
const std::vector<std::string>& diagnostics_columns();

// Rows with step % every == 0; every = 1 writes all of them.
void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostics>& rows, int every = 1);

void write_snapshot(const std::string& path, const StaggeredGrid& grid, const EdgeField& B, const NodeField& xi,
                    double t);

struct SnapshotFile {
  std::array<int, 3> cells{};
  Vec3 spacing{};
  double t = 0.0;
  EdgeField B;
  NodeField xi;
};
SnapshotFile read_snapshot(const std::string& path);

void write_certification(const std::string& path, const std::vector<CertificationReport>& reports);
void write_eps_sweep_csv(const std::string& path, const EpsSweep& sweep);
void write_tau_study_csv(const std::string& path, const TauStudy& study);
void write_uniqueness_csv(const std::string& path, const UniquenessReport& report);
void write_mms_csv(const std::string& path, const MmsReport& report);

// %.17g, the format of every numeric CSV and snapshot entry.
std::string format_double(double v);

}  // namespace mheat
