#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dimerhole/geometry.hpp"
#include "dimerhole/verify.hpp"

namespace dimerhole {

// Pass/fail thresholds of a run. The sample minimums guard the statistical
// tests and may be lowered for smoke runs.
struct Gates {
  double z = 4.0;
  double tv = 0.05;
  double p_value = 1e-3;
  std::size_t min_moment_samples = 500;
  std::size_t min_gof_samples = 2000;
  // With two or more scales, the hole-law distance must shrink from the
  // coarsest to the finest scale.
  bool require_trend = true;
};

struct ExperimentConfig {
  std::string name;
  DomainSpec domain;           // continuum units
  std::vector<double> scales;  // lattice spacings eps, continuum units
  std::size_t samples = 0;     // N per scale
  std::uint64_t seed = 0;
  std::vector<QueryWindow> queries;
  int mesh_cells = 256;  // harmonic mesh cells across the longer side
  int threads = 1;
  Gates gates;
  std::string output_dir = "out";
  std::string source;  // the JSON text the config was parsed from
};

// Parses and validates a JSON config. Errors are kConfig with the field path
// and, where it can be located, the line, e.g.
//   "samples (line 7): N must be ≥ 1".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON of the parsed config (stable key order).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace dimerhole
