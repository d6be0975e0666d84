#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logtr/degradation.hpp"
#include "logtr/metrics.hpp"
#include "logtr/solver.hpp"

namespace logtr {

// Flat experiment description. The ground truth comes from exactly one of
// ground_truth (TNSR path), phantom_dims (synthetic), or the y_path/z_path pair.
struct ExperimentConfig {
  std::optional<std::string> ground_truth;
  std::optional<Dims> phantom_dims;
  Ranks phantom_ranks{2, 4, 2};
  std::optional<std::string> y_path, z_path;
  std::optional<std::string> response_path;  // b x B TNSR matrix

  std::string blur_kernel = "gaussian";  // gaussian | delta
  std::size_t blur_size = 7;
  double blur_sigma = 2.0;
  std::size_t factor = 4;
  std::size_t bands = 4;
  std::optional<double> snr_hsi_db = 25.0;  // nullopt: noise off
  std::optional<double> snr_msi_db = 30.0;

  SolverConfig solver;
  MetricsOptions metrics;

  bool disable_ltnn_spectral = false;
  bool disable_ltnn_spatial = false;
  bool disable_tv = false;
  bool baseline_trkj = false;

  std::string output_dir = "out";
  std::uint64_t seed = 0;

  bool has_ground_truth() const { return ground_truth || phantom_dims; }
  // Solver settings after ablation switches are applied.
  SolverConfig effective_solver() const;
  // Throws ConfigError on inconsistent combinations.
  void validate() const;
};

// Parses a JSON document; unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Full JSON echo of every field, including defaults.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

// Smooth nonnegative ring cores (a few random cosines per fibre), scaled so
// the composed tensor peaks at 1.
TRFactors make_phantom(const Dims& dims, Ranks ranks, std::uint64_t seed);

struct Problem {
  std::optional<Tensor> truth;
  Tensor y, z;
  DegradationModel model;
};

// Loads or synthesizes the ground truth, builds the operators and simulates
// noisy observations (noise seeds derived from cfg.seed), or loads y/z.
Problem prepare_problem(const ExperimentConfig& cfg);

struct FuseOutcome {
  FusionResult result;
  std::optional<MetricsReport> metrics;
  std::optional<MetricsReport> baseline;
};

// Naive estimate: Z lifted spectrally by the pseudoinverse of the spectral operator.
Tensor spectral_lift_baseline(const Tensor& z, const Matrix& spectral_op);

// Metrics on the [0, 255] scale fixed by the ground-truth range.
MetricsReport score(const Tensor& truth, const Tensor& est, const ExperimentConfig& cfg);

FuseOutcome run_fusion(const Problem& problem, const ExperimentConfig& cfg);

void cmd_simulate(const ExperimentConfig& cfg);
FuseOutcome cmd_fuse(const ExperimentConfig& cfg);

struct AblationRow {
  std::string variant;
  SolverConfig solver;
  MetricsReport metrics;
  std::size_t iterations = 0;
  bool converged = false;
};
std::vector<AblationRow> cmd_ablate(const ExperimentConfig& cfg);

// Scores est against ref after mapping both by the affine map taking ref's range
// onto [0, 255], as fuse does; writes metrics.json into out_dir when given. Returns the report.
MetricsReport cmd_metrics(const std::filesystem::path& ref, const std::filesystem::path& est, double factor,
                          const MetricsOptions& opts, const std::optional<std::filesystem::path>& out_dir);

std::string version_string();

}  // namespace logtr
