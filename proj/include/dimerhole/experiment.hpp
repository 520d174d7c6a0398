#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimerhole/config.hpp"
#include "dimerhole/verify.hpp"

namespace dimerhole {

// Shortest round-trip decimal form of x.
std::string format_double(double x);

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

// Hash of the canonical config without the fields that must not change
// results (threads, output_dir).
std::string config_hash(const ExperimentConfig& config);

std::string surface_json(const SurfaceData& surface, const Eigen::VectorXd& e);
std::string moment_report_json(const MomentReport& report);
std::string gof_report_json(const GofReport& report, double tv_gate, double p_gate);
std::string gof_report_table(const GofReport& report);

struct RunOptions {
  int eps_index = -1;  // -1 runs every scale
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  bool render = true;
};

struct ScaleResult {
  double eps = 0.0;
  int whites = 0;
  int genus = 0;
  MomentReport moments;
  std::optional<GofReport> gof;
  // Exact lattice Var(Z_k / 4) from the Kasteleyn inverse against Var(X_k)
  // of the discrete Gaussian; the largest gap over holes.
  double variance_gap = 0.0;
  bool pass = false;
};

struct ArtifactEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<ScaleResult> scales;
  // Coarsest-to-finest comparison; only present with two or more scales at
  // genus >= 1.
  std::optional<bool> variance_trend;
  std::optional<bool> tv_trend;
  bool pass = false;
  std::vector<ArtifactEntry> artifacts;
  std::string output_dir;
};

// Region build, Kasteleyn system, sampling, heights, predictions on the
// region's own lattice domain and verification, per configured scale. Writes
// every artifact plus manifest.json into the output directory. Module errors
// are rethrown with the stage and scale in the message.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Per-scale seed: derive_seed(master, scale index).
std::uint64_t scale_seed(std::uint64_t master, std::size_t scale_index);

}  // namespace dimerhole
