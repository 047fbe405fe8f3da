// Downhill simplex (Nelder-Mead) iteration engine and the robust variant
// that adds degeneracy correction and reevaluation of long-standing vertices.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rdsm/core.hpp"
#include "rdsm/geometry.hpp"
#include "rdsm/objective.hpp"

namespace rdsm {

/// Thrown by Evaluator when a call would exceed the evaluation budget.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Evaluation front end for one run: hands out point ids, enforces the
/// evaluation budget, owns the noise stream and ledger, and logs every
/// evaluated point for the output archives. Not shared between runs.
class Evaluator {
 public:
  Evaluator(const ObjectiveSpec& spec, std::uint64_t seed,
            std::int64_t max_evaluations = std::numeric_limits<std::int64_t>::max());

  /// Evaluates a new point under a fresh id. The returned vertex has
  /// counter 0 and a one-element history.
  Vertex evaluate_new(const Point& x, Operation origin);

  /// One more raw measurement at an existing vertex; appended to its history.
  double remeasure(Vertex& vertex);

  /// Where subsequently evaluated points are filed in the points database.
  void set_context(int iteration, int simplex_id);

  struct Checkpoint {
    EvaluationLedger::Mark ledger;
    RandomStream rng;
    std::size_t points = 0;
    std::size_t evaluations = 0;
    PointId next_id = 0;
  };
  Checkpoint checkpoint() const;
  void rollback(const Checkpoint& cp);

  const ObjectiveSpec& spec() const { return *spec_; }
  const EvaluationLedger& ledger() const { return ledger_; }
  std::int64_t total_calls() const { return ledger_.total_calls(); }
  std::int64_t max_evaluations() const { return max_evaluations_; }

  const std::vector<PointRecord>& points() const { return points_; }
  const std::vector<EvaluationEntry>& evaluations() const { return evaluations_; }
  std::vector<PointRecord> take_points() { return std::move(points_); }
  std::vector<EvaluationEntry> take_evaluations() { return std::move(evaluations_); }

 private:
  double call(const Point& x, PointId id);

  const ObjectiveSpec* spec_;
  std::int64_t max_evaluations_;
  EvaluationLedger ledger_;
  RandomStream rng_;
  std::vector<PointRecord> points_;
  std::vector<EvaluationEntry> evaluations_;
  PointId next_id_ = 1;
  int iteration_ = 0;
  int simplex_id_ = 0;
};

/// x0 plus, per axis, x0 with that coordinate scaled by (1 + delta); a zero
/// coordinate is set to 0.00025 instead.
std::vector<Point> initial_simplex_points(const Point& x0, double delta);

/// x0 plus, per axis, x0 moved by delta * (hi_i - lo_i) along that axis; the
/// step flips sign when it would leave the box.
std::vector<Point> domain_simplex_points(const Point& x0, double delta, const Box& bounds);

/// Evaluates the initial vertices and returns them ordered. kDomain needs the
/// objective to have bounds.
SimplexState initial_simplex(const Point& x0, double delta, Evaluator& evaluator,
                             InitialSimplexRule rule = InitialSimplexRule::kRelative);

struct IterationOutcome {
  Operation operation = Operation::kReflection;
  std::vector<PointId> removed;
  std::vector<PointId> added;
  // Simplex right after the step, before re-ordering: the replaced slots hold
  // the newcomers.
  std::vector<PointId> slot_ids;
  std::vector<int> slot_counters;
  std::int64_t evaluations = 0;
  SimplexState state;  // ordered
};

/// One Nelder-Mead step: reflect, then expand, accept, contract (outside or
/// inside) or shrink. `state` must be ordered. Survivors' counters go up by
/// one, newcomers start at 0.
IterationOutcome dsm_iteration(const SimplexState& state, const CoefficientSet& coeffs,
                               Evaluator& evaluator);

/// Reevaluates every vertex whose counter reached `threshold`: one fresh
/// measurement, stored cost becomes the mean of its whole history, counter
/// resets. Re-orders the state. Events carry `state.iteration`.
std::vector<ReevaluationEvent> reevaluation_pass(SimplexState& state, Evaluator& evaluator,
                                                 int threshold);

RunRecord run_dsm(const OptimizerConfig& config, const ObjectiveSpec& spec,
                  std::uint64_t seed);
RunRecord run_rdsm(const OptimizerConfig& config, const ObjectiveSpec& spec,
                   std::uint64_t seed);
RunRecord run(Algorithm algorithm, const OptimizerConfig& config, const ObjectiveSpec& spec,
              std::uint64_t seed);

}  // namespace rdsm
