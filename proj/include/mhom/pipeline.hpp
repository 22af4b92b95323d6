#pragma once

// Subcommand implementations. Each writes its outputs into one directory
// atomically: either every file appears or none does.

#include <iosfwd>
#include <string>

#include "mhom/config.hpp"
#include "mhom/effective.hpp"

namespace mhom {

struct RunOptions {
  std::string out_dir;
  int jobs = 1;
  bool dry_run = false;
  std::ostream *log = nullptr;
};

/// Human-readable plan printed by --dry-run.
std::string describe_plan(const ExperimentConfig &cfg, const std::string &command, const RunOptions &opts);

/// Each returns the process exit code (0 on success; verify returns 1 when a
/// property fails). Errors propagate as exceptions.
int cmd_mesh(const ExperimentConfig &cfg, const RunOptions &opts);
int cmd_corrector(const ExperimentConfig &cfg, const RunOptions &opts);
int cmd_effective(const ExperimentConfig &cfg, const RunOptions &opts);
int cmd_homogenize(const ExperimentConfig &cfg, const RunOptions &opts);
int cmd_verify(const ExperimentConfig &cfg, const RunOptions &opts);

/// A⁰ and θ used by the homogenize command when no effective.json is given.
struct HomogenizedCoefficients {
  Mat2 A0;
  double theta = 0.0;
  std::string source;  // "periodic-cell", "monte-carlo" or a file path
};
HomogenizedCoefficients homogenized_coefficients(const ExperimentConfig &cfg, const CellMesh &cell, int jobs);

/// MINUS area of one deformed reference cell mesh, averaged over the bit law of the map.
double discrete_theta(const CellMesh &cell, const DeformationMap &map);

}  // namespace mhom
