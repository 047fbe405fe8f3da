// Shared domain types for the downhill simplex optimizers.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rdsm {

using Point = Eigen::VectorXd;
using PointId = std::int64_t;

/// Raised when a caller hands an operation malformed input
/// (wrong dimension, wrong vertex count, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a run configuration is inconsistent with the objective.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Operation {
  kInitial,
  kReflection,
  kExpansion,
  kOutsideContraction,
  kInsideContraction,
  kShrink,
  kDegeneracyCorrection,
  kReevaluation,
};

std::string_view to_string(Operation op);
Operation parse_operation(std::string_view label);

enum class Algorithm { kDsm, kRdsm };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

/// How the n extra starting vertices are placed around x0.
///   relative: coordinate i scaled by (1 + delta), or 0.00025 where x0_i == 0
///   domain:   x0_i + delta * (hi_i - lo_i), stepping the other way when that
///             would leave the box
///   automatic: domain when the objective has bounds, relative otherwise
enum class InitialSimplexRule { kAutomatic, kRelative, kDomain };

std::string_view to_string(InitialSimplexRule rule);
InitialSimplexRule parse_initial_simplex_rule(std::string_view name);

struct Vertex {
  Point coords;
  double cost = std::numeric_limits<double>::quiet_NaN();
  // Iterations this vertex has stayed in the simplex since it entered
  // (or since its last reevaluation).
  int counter = 0;
  // Every raw objective value measured at coords during the run.
  std::vector<double> history;
  PointId id = -1;
};

struct SimplexState {
  std::vector<Vertex> vertices;
  int dimension = 0;
  int iteration = 0;

  /// Ascending by cost; equal costs keep the lower id first.
  void sort();
  bool is_sorted() const;

  const Vertex& best() const { return vertices.front(); }
  const Vertex& worst() const { return vertices.back(); }

  std::vector<Point> points() const;
  std::vector<double> costs() const;
  std::vector<PointId> ids() const;
  std::vector<int> counters() const;
};

struct CoefficientSet {
  double reflection = 1.0;       // alpha
  double expansion = 2.0;        // gamma
  double contraction = 0.5;      // rho
  double shrink = 0.5;           // sigma
  double edge_threshold = 0.1;   // theta_e
  double volume_threshold = 0.1; // theta_v
  double initial_simplex = 0.05; // delta

  /// Throws ConfigError when a coefficient is out of its admissible range.
  /// Thresholds may be 0, which switches degeneracy detection off.
  void validate() const;
};

struct StopCriteria {
  int max_iterations = 200;
  std::int64_t max_evaluations = 400;
  // Stop once max_i |J_i - J_best| (after cost scaling) falls to this value.
  std::optional<double> cost_tolerance;
  // Stop once max_i ||x_i - x_best||_inf falls to this value.
  std::optional<double> simplex_tolerance;

  void validate() const;
};

struct OptimizerConfig {
  CoefficientSet coefficients;
  StopCriteria stop;
  Point x0;
  // A vertex is reevaluated once its counter reaches ceil(factor * n).
  // +infinity disables reevaluation.
  double reevaluation_factor = 1.5;
  InitialSimplexRule initial_rule = InitialSimplexRule::kAutomatic;

  int reevaluation_threshold(int dimension) const;
};

/// One line of the simplex history: the simplex before and after an
/// operation. `after` keeps slot order (the replaced slot holds the newcomer),
/// counters are aligned with `after`.
struct SimplexRow {
  int iteration = 0;
  int simplex_id = 0;
  Operation operation = Operation::kInitial;
  std::vector<PointId> before;
  std::vector<PointId> after;
  std::vector<int> counters;
  double best_cost = 0.0;
  std::int64_t evaluations = 0;
};

struct PointRecord {
  PointId id = -1;
  Point coords;
  double value = 0.0;
  int simplex_id = 0;
  int iteration = 0;
  Operation operation = Operation::kInitial;
};

struct EvaluationEntry {
  std::int64_t index = 0;  // 1-based
  PointId point = -1;
  double value = 0.0;
};

struct ReevaluationEvent {
  int iteration = 0;
  PointId point = -1;
  Point coords;
  double cost_before = 0.0;
  double cost_after = 0.0;
};

enum class Degeneracy { kNone, kEdge, kVolume, kBoth };

std::string_view to_string(Degeneracy d);

struct DegeneracyEvent {
  int iteration = 0;
  Degeneracy classification = Degeneracy::kNone;
  double epsilon_e = 0.0;
  double epsilon_v = 0.0;
  std::vector<PointId> removed;
  std::vector<PointId> added;
  bool failed = false;
};

enum class StopReason {
  kMaxIterations,
  kMaxEvaluations,
  kCostTolerance,
  kSimplexTolerance,
};

std::string_view to_string(StopReason reason);

struct RunRecord {
  Algorithm algorithm = Algorithm::kDsm;
  int dimension = 0;
  std::vector<SimplexRow> rows;
  std::vector<PointRecord> points;
  std::vector<EvaluationEntry> evaluations;
  std::vector<ReevaluationEvent> reevaluations;
  std::vector<DegeneracyEvent> degeneracies;
  std::int64_t total_evaluations = 0;
  int iterations = 0;
  StopReason stop_reason = StopReason::kMaxIterations;
  SimplexState final_state;
  Vertex best;

  /// Operation labels of the Nelder-Mead rows only, in order.
  std::vector<Operation> nelder_mead_operations() const;
};

}  // namespace rdsm
