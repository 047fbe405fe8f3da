// Objective functions, domain restrictions, noise and the evaluation gateway.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rdsm/core.hpp"

namespace rdsm {

/// Axis-aligned box [lo, hi] per coordinate.
struct Box {
  Point lo;
  Point hi;

  bool contains_closed(const Point& x) const;
  bool contains_open(const Point& x) const;
};

/// A box region whose interior returns a fixed penalty instead of the
/// base function.
struct Obstacle {
  Box region;
  double penalty = 1e3;
};

struct NoiseModel {
  enum class Kind { kUniform, kGaussian };
  Kind kind = Kind::kUniform;
  // Uniform: [lower, upper]. Gaussian: mean 0 and the given variance.
  double lower = 0.0;
  double upper = 0.0;
  double variance = 0.0;

  static NoiseModel uniform(double lower, double upper);
  static NoiseModel gaussian(double variance);

  /// Parses "uniform:a,b" or "gaussian:variance".
  static NoiseModel parse(std::string_view text);
  std::string to_string() const;

  void validate() const;
};

/// Seeded random source for noise draws. Uses mt19937_64 (bit-exact by the
/// standard) with hand-rolled transforms so a seed yields the same stream on
/// every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform01();
  double standard_normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

double sample_noise(const NoiseModel& model, RandomStream& rng);

using BaseFunction = std::function<double(const Point&)>;

struct ObjectiveSpec {
  std::string name;
  int dimension = 0;
  BaseFunction base_function;
  std::optional<Box> bounds;
  std::optional<Obstacle> obstacle;
  std::optional<NoiseModel> noise;
  // Positive multiplier applied to costs inside the optimizer (tolerance
  // checks). Recorded values stay unscaled.
  double scale = 1.0;

  void validate() const;

  /// Objective value at x without noise: +inf outside bounds, the penalty
  /// inside the obstacle, the base function otherwise.
  double noise_free_value(const Point& x) const;
};

/// Total raw objective calls plus every point's measurement history.
class EvaluationLedger {
 public:
  struct Mark {
    std::size_t log_size = 0;
  };

  void record(PointId id, double value);

  std::int64_t total_calls() const { return static_cast<std::int64_t>(log_.size()); }
  const std::vector<double>& history(PointId id) const;
  bool contains(PointId id) const { return histories_.count(id) != 0; }
  std::size_t point_count() const { return histories_.size(); }

  Mark mark() const { return Mark{log_.size()}; }
  /// Drops every call recorded after `m`.
  void rollback(const Mark& m);

 private:
  std::vector<PointId> log_;
  std::map<PointId, std::vector<double>> histories_;
};

/// The single evaluation gateway: checks the dimension, applies bounds and
/// obstacle, adds noise to regular values, and books the raw value in the
/// ledger under `id`.
double evaluate(const ObjectiveSpec& spec, const Point& x, EvaluationLedger& ledger,
                RandomStream& rng, PointId id);

double linear_gradient(double x1, double x2);
double rosenbrock(const Point& x);

/// 2-D linear gradient on [-1,1]^2.
ObjectiveSpec make_linear_gradient(bool with_obstacle);
/// n-D Rosenbrock on [-5,10]^n.
ObjectiveSpec make_rosenbrock(int dimension);

/// Built-in objectives: "linear-gradient", "linear-gradient-obstacle",
/// "rosenbrock". A dimension of 0 picks the objective's default.
ObjectiveSpec make_builtin_objective(std::string_view name, int dimension);
std::vector<std::string> builtin_objective_names();

}  // namespace rdsm
