#pragma once

// Experiment configuration.
//
// Flat key = value pairs grouped in [sections]; '#' or ';' start comments.
// A JSON object of objects with the same section and key names is accepted
// as well. Unknown keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhom/conductivity.hpp"
#include "mhom/geometry.hpp"
#include "mhom/homogenize.hpp"
#include "mhom/mesh.hpp"

namespace mhom {

struct ExperimentConfig {
  // [geometry]
  double radius = 0.25;
  MapKind map = MapKind::Identity;
  double bump_amplitude = 0.1;
  // [conductivity]
  std::string conductivity = "identity";
  // [mesh]
  double h = 0.05;
  MembraneRule membranes = MembraneRule::Distance;
  // [corrector]
  double delta = 1e-3;
  int n = 8;
  int m = 4;
  std::vector<std::string> directions{"e1", "e2"};
  // [monte_carlo]
  std::uint64_t master_seed = 1;
  int samples = 1;
  std::vector<std::uint64_t> seeds;  // explicit list overrides master_seed/samples
  // [homogenize]
  std::vector<int> inv_eps{4, 8, 16};  // ε = 1 / inv_eps
  SourcePreset source = SourcePreset::One;
  int homog_n = 128;
  std::string effective_json;  // optional precomputed effective.json
  // [verify]
  int induction_instances = 1000;
  // [output]
  std::string output_dir = "out";

  /// Line of each key in the source text (0 when defaulted).
  std::map<std::string, int> lines;

  InterfaceSpec interface_spec() const;
  DeformationMap deformation() const;
  Conductivity conductivity_field() const;
  std::vector<Vec2> direction_vectors() const;
  /// Explicit seeds, or splitmix64(master_seed + i) for i < samples.
  std::vector<std::uint64_t> seed_list() const;
  std::vector<double> eps_list() const;

  /// Cross-key checks; throws ConfigError naming the key.
  void validate() const;
  /// Sorted section.key=value lines of every setting except the output directory.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);

/// "1/8" -> 8, "0.125" -> 8; throws ConfigError unless 1/ε is a positive integer.
int parse_inverse_eps(const std::string &token, const std::string &key, int line);

std::uint64_t fnv1a64(const std::string &data);

}  // namespace mhom
