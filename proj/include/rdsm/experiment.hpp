// Experiment plumbing shared by the command-line tool and the Python module:
// run configuration, seeded replication studies and the reference scenarios.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdsm/core.hpp"
#include "rdsm/objective.hpp"

namespace rdsm {

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kRdsm;
  std::string objective = "linear-gradient";
  int dimension = 0;  // 0: the objective's default
  std::vector<double> x0;
  CoefficientSet coefficients;
  int max_iterations = 200;
  std::int64_t max_evaluations = 400;
  std::optional<NoiseModel> noise;
  std::uint64_t seed = 1;
  int repeat = 1;
  double scale = 1.0;
  InitialSimplexRule initial_rule = InitialSimplexRule::kAutomatic;
  std::string out_dir = "rdsm-output";
  bool emit_trajectory = false;

  /// Throws ConfigError on inconsistent settings (missing x0, dimension
  /// mismatch, bad coefficients, ...).
  void validate() const;
  ObjectiveSpec objective_spec() const;
  OptimizerConfig optimizer_config() const;

  /// One `key = value` line per setting; keys are the long flag names and
  /// string values are double-quoted.
  std::string to_config_text() const;
};

/// Parses text produced by to_config_text (or written by hand in the same
/// form: `key = value`, `#` comments, blank lines). Unknown keys throw
/// ConfigError.
ExperimentConfig parse_config_text(const std::string& text);

std::vector<double> parse_real_list(const std::string& text);
std::string format_real_list(const std::vector<double>& values);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  Point endpoint;
  double true_cost = 0.0;  // noise-free objective at the endpoint
  int iterations = 0;
  std::int64_t evaluations = 0;
};

struct ReplicationSummary {
  std::vector<RunSummary> runs;
  Point endpoint_mean;
  Point endpoint_variance;
  double cost_mean = 0.0;
  double cost_variance = 0.0;

  double cost_stddev() const;
  /// Header `run,seed,x_1..x_n,J,iters,evals`, one line per run.
  std::string to_csv() const;
};

/// Sample mean and unbiased variance (0 for a single value).
void mean_and_variance(const std::vector<double>& values, double& mean, double& variance);

/// Runs config.repeat independent runs with seeds seed, seed+1, ... and
/// aggregates their endpoints. `records`, when given, receives every run.
ReplicationSummary run_replications(const ExperimentConfig& config,
                                    std::vector<RunRecord>* records = nullptr);

struct ScenarioCheck {
  std::string label;
  std::string measured;
  bool passed = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<ScenarioCheck> checks;
  // Noise scenarios carry the DSM and rDSM replication summaries.
  std::vector<std::pair<Algorithm, ReplicationSummary>> summaries;

  bool passed() const;
};

/// The fixed scenario names, in run order.
std::vector<std::string> scenario_names();

/// Runs every scenario whose name starts with `only` (all when empty).
/// Throws ConfigError when the filter matches nothing.
std::vector<ScenarioReport> reproduce(const std::string& only = "");

/// Plain-text pass/fail table.
std::string format_report(const std::vector<ScenarioReport>& reports);

}  // namespace rdsm
