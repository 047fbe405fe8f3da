#include "rdsm/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace rdsm {

namespace {

constexpr double kZeroCoordinateStep = 0.00025;

// Identical measurements average back to exactly that value.
double history_mean(const std::vector<double>& history) {
  const double first = history.front();
  double offset = 0.0;
  for (double h : history) offset += h - first;
  if (!std::isfinite(first)) {
    return std::accumulate(history.begin(), history.end(), 0.0) /
           static_cast<double>(history.size());
  }
  return first + offset / static_cast<double>(history.size());
}

Point centroid_of_best(const SimplexState& state) {
  const int n = state.dimension;
  Point c = Point::Zero(n);
  for (int i = 0; i < n; ++i) c += state.vertices[i].coords;
  return c / static_cast<double>(n);
}

bool tolerances_met(const SimplexState& state, const StopCriteria& stop, double scale,
                    StopReason& reason) {
  const Vertex& best = state.best();
  if (stop.cost_tolerance) {
    double spread = 0.0;
    for (const auto& v : state.vertices) {
      spread = std::max(spread, std::abs(v.cost - best.cost));
    }
    if (std::isfinite(spread) && scale * spread <= *stop.cost_tolerance) {
      reason = StopReason::kCostTolerance;
      return true;
    }
  }
  if (stop.simplex_tolerance) {
    double size = 0.0;
    for (const auto& v : state.vertices) {
      size = std::max(size, (v.coords - best.coords).lpNorm<Eigen::Infinity>());
    }
    if (size <= *stop.simplex_tolerance) {
      reason = StopReason::kSimplexTolerance;
      return true;
    }
  }
  return false;
}

class RunEngine {
 public:
  RunEngine(Algorithm algorithm, const OptimizerConfig& config, const ObjectiveSpec& spec,
            std::uint64_t seed)
      : algorithm_(algorithm),
        config_(config),
        spec_(spec),
        evaluator_(spec, seed, config.stop.max_evaluations) {}

  RunRecord run() {
    record_.algorithm = algorithm_;
    record_.dimension = spec_.dimension;

    evaluator_.set_context(0, 0);
    SimplexState state = initial_simplex(config_.x0, config_.coefficients.initial_simplex,
                                         evaluator_, config_.initial_rule);
    const int threshold = config_.reevaluation_threshold(spec_.dimension);

    while (true) {
      if (state.iteration >= config_.stop.max_iterations) {
        record_.stop_reason = StopReason::kMaxIterations;
        break;
      }
      if (evaluator_.total_calls() >= config_.stop.max_evaluations) {
        record_.stop_reason = StopReason::kMaxEvaluations;
        break;
      }
      StopReason reason{};
      if (tolerances_met(state, config_.stop, spec_.scale, reason)) {
        record_.stop_reason = reason;
        break;
      }

      const auto checkpoint = evaluator_.checkpoint();
      const auto rows = record_.rows.size();
      const auto reevaluations = record_.reevaluations.size();
      const auto degeneracies = record_.degeneracies.size();
      const int simplex_id = simplex_id_;
      try {
        state = step(state, threshold);
      } catch (const BudgetExhausted&) {
        evaluator_.rollback(checkpoint);
        record_.rows.resize(rows);
        record_.reevaluations.resize(reevaluations);
        record_.degeneracies.resize(degeneracies);
        simplex_id_ = simplex_id;
        record_.stop_reason = StopReason::kMaxEvaluations;
        break;
      }
    }

    record_.iterations = state.iteration;
    record_.total_evaluations = evaluator_.total_calls();
    record_.best = state.best();
    record_.final_state = std::move(state);
    record_.points = evaluator_.take_points();
    record_.evaluations = evaluator_.take_evaluations();
    return std::move(record_);
  }

 private:
  SimplexState step(const SimplexState& state, int threshold) {
    const int iteration = state.iteration + 1;
    evaluator_.set_context(iteration, ++simplex_id_);
    IterationOutcome outcome = dsm_iteration(state, config_.coefficients, evaluator_);
    SimplexRow row;
    row.iteration = iteration;
    row.simplex_id = simplex_id_;
    row.operation = outcome.operation;
    row.before = state.ids();
    row.after = outcome.slot_ids;
    row.counters = outcome.slot_counters;
    SimplexState next = std::move(outcome.state);
    push_row(std::move(row), next);

    if (algorithm_ == Algorithm::kRdsm) {
      correct(next);
      reevaluate(next, threshold);
    }
    return next;
  }

  void correct(SimplexState& state) {
    const auto& coeffs = config_.coefficients;
    const auto points = state.points();
    const auto report =
        detect_degeneracy(points, coeffs.edge_threshold, coeffs.volume_threshold);
    if (!report.degenerate()) return;

    const auto costs = state.costs();
    const CorrectionResult corrected =
        correct_degeneracy(points, costs, coeffs.edge_threshold, coeffs.volume_threshold);

    DegeneracyEvent event;
    event.iteration = state.iteration;
    event.classification = report.classification;
    event.epsilon_e = report.epsilon_e;
    event.epsilon_v = report.epsilon_v;
    event.failed = corrected.failed;
    if (corrected.moved.empty()) {
      record_.degeneracies.push_back(std::move(event));
      return;
    }

    SimplexRow row;
    row.iteration = state.iteration;
    row.simplex_id = ++simplex_id_;
    row.operation = Operation::kDegeneracyCorrection;
    row.before = state.ids();
    evaluator_.set_context(state.iteration, simplex_id_);
    for (std::size_t slot : corrected.moved) {
      Vertex fresh = evaluator_.evaluate_new(corrected.vertices[slot],
                                             Operation::kDegeneracyCorrection);
      event.removed.push_back(state.vertices[slot].id);
      event.added.push_back(fresh.id);
      state.vertices[slot] = std::move(fresh);
    }
    row.after = state.ids();
    row.counters = state.counters();
    state.sort();
    record_.degeneracies.push_back(std::move(event));
    push_row(std::move(row), state);
  }

  void reevaluate(SimplexState& state, int threshold) {
    const auto before = state.ids();
    bool due = false;
    for (const auto& v : state.vertices) due = due || v.counter >= threshold;
    if (!due) return;

    evaluator_.set_context(state.iteration, simplex_id_ + 1);
    // Counters in slot order after the reset, captured before re-ordering.
    std::vector<int> counters = state.counters();
    for (std::size_t i = 0; i < counters.size(); ++i) {
      if (counters[i] >= threshold) counters[i] = 0;
    }
    auto events = reevaluation_pass(state, evaluator_, threshold);

    SimplexRow row;
    row.iteration = state.iteration;
    row.simplex_id = ++simplex_id_;
    row.operation = Operation::kReevaluation;
    row.before = before;
    row.after = before;
    row.counters = std::move(counters);
    for (auto& e : events) record_.reevaluations.push_back(std::move(e));
    push_row(std::move(row), state);
  }

  void push_row(SimplexRow row, const SimplexState& state) {
    row.best_cost = state.best().cost;
    row.evaluations = evaluator_.total_calls();
    record_.rows.push_back(std::move(row));
  }

  Algorithm algorithm_;
  const OptimizerConfig& config_;
  const ObjectiveSpec& spec_;
  Evaluator evaluator_;
  RunRecord record_;
  int simplex_id_ = 0;
};

void validate_run(const OptimizerConfig& config, const ObjectiveSpec& spec) {
  spec.validate();
  config.coefficients.validate();
  config.stop.validate();
  if (config.x0.size() != spec.dimension) {
    throw ConfigError("starting point has dimension " + std::to_string(config.x0.size()) +
                      " but objective '" + spec.name + "' has dimension " +
                      std::to_string(spec.dimension));
  }
  if (!config.x0.allFinite()) throw ConfigError("starting point must be finite");
  if (config.stop.max_evaluations < spec.dimension + 1) {
    throw ConfigError("evaluation budget " + std::to_string(config.stop.max_evaluations) +
                      " cannot cover the " + std::to_string(spec.dimension + 1) +
                      " initial vertices");
  }
  if (config.initial_rule == InitialSimplexRule::kDomain && !spec.bounds) {
    throw ConfigError("the domain initial simplex rule needs an objective with bounds");
  }
  if (!(config.reevaluation_factor > 0.0)) {
    throw ConfigError("reevaluation factor must be > 0");
  }
}

}  // namespace

Evaluator::Evaluator(const ObjectiveSpec& spec, std::uint64_t seed,
                     std::int64_t max_evaluations)
    : spec_(&spec), max_evaluations_(max_evaluations), rng_(seed) {}

double Evaluator::call(const Point& x, PointId id) {
  if (ledger_.total_calls() >= max_evaluations_) throw BudgetExhausted();
  const double value = evaluate(*spec_, x, ledger_, rng_, id);
  evaluations_.push_back(EvaluationEntry{ledger_.total_calls(), id, value});
  return value;
}

Vertex Evaluator::evaluate_new(const Point& x, Operation origin) {
  Vertex v;
  v.id = next_id_;
  v.coords = x;
  v.cost = call(x, v.id);
  v.history.push_back(v.cost);
  ++next_id_;
  points_.push_back(PointRecord{v.id, x, v.cost, simplex_id_, iteration_, origin});
  return v;
}

double Evaluator::remeasure(Vertex& vertex) {
  const double value = call(vertex.coords, vertex.id);
  vertex.history.push_back(value);
  return value;
}

void Evaluator::set_context(int iteration, int simplex_id) {
  iteration_ = iteration;
  simplex_id_ = simplex_id;
}

Evaluator::Checkpoint Evaluator::checkpoint() const {
  return Checkpoint{ledger_.mark(), rng_, points_.size(), evaluations_.size(), next_id_};
}

void Evaluator::rollback(const Checkpoint& cp) {
  ledger_.rollback(cp.ledger);
  rng_ = cp.rng;
  points_.resize(cp.points);
  evaluations_.resize(cp.evaluations);
  next_id_ = cp.next_id;
}

std::vector<Point> initial_simplex_points(const Point& x0, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("initial simplex coefficient must be > 0");
  std::vector<Point> points;
  points.reserve(x0.size() + 1);
  points.push_back(x0);
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    Point p = x0;
    p[i] = x0[i] != 0.0 ? (1.0 + delta) * x0[i] : kZeroCoordinateStep;
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<Point> domain_simplex_points(const Point& x0, double delta, const Box& bounds) {
  if (!(delta > 0.0)) throw InvalidInput("initial simplex coefficient must be > 0");
  if (bounds.lo.size() != x0.size() || bounds.hi.size() != x0.size()) {
    throw InvalidInput("bounds dimension does not match the starting point");
  }
  std::vector<Point> points;
  points.reserve(x0.size() + 1);
  points.push_back(x0);
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    const double step = delta * (bounds.hi[i] - bounds.lo[i]);
    Point p = x0;
    p[i] = x0[i] + step <= bounds.hi[i] ? x0[i] + step : x0[i] - step;
    points.push_back(std::move(p));
  }
  return points;
}

SimplexState initial_simplex(const Point& x0, double delta, Evaluator& evaluator,
                             InitialSimplexRule rule) {
  const auto& bounds = evaluator.spec().bounds;
  if (rule == InitialSimplexRule::kAutomatic) {
    rule = bounds ? InitialSimplexRule::kDomain : InitialSimplexRule::kRelative;
  }
  if (rule == InitialSimplexRule::kDomain && !bounds) {
    throw ConfigError("the domain initial simplex rule needs an objective with bounds");
  }
  const auto points = rule == InitialSimplexRule::kDomain
                          ? domain_simplex_points(x0, delta, *bounds)
                          : initial_simplex_points(x0, delta);
  SimplexState state;
  state.dimension = static_cast<int>(x0.size());
  for (const auto& p : points) {
    state.vertices.push_back(evaluator.evaluate_new(p, Operation::kInitial));
  }
  state.sort();
  return state;
}

IterationOutcome dsm_iteration(const SimplexState& state, const CoefficientSet& coeffs,
                               Evaluator& evaluator) {
  const int n = state.dimension;
  if (static_cast<int>(state.vertices.size()) != n + 1) {
    throw InvalidInput("simplex must have n+1 vertices");
  }
  if (!state.is_sorted()) throw InvalidInput("dsm_iteration needs an ordered simplex");

  const auto calls_before = evaluator.total_calls();
  const Vertex& best = state.vertices.front();
  const Vertex& second_worst = state.vertices[n - 1];
  const Vertex& worst = state.vertices[n];
  const Point centroid = centroid_of_best(state);

  IterationOutcome out;
  std::optional<Vertex> newcomer;

  Vertex reflected = evaluator.evaluate_new(
      centroid + coeffs.reflection * (centroid - worst.coords), Operation::kReflection);
  if (reflected.cost < best.cost) {
    Vertex expanded = evaluator.evaluate_new(
        centroid + coeffs.expansion * (reflected.coords - centroid), Operation::kExpansion);
    if (expanded.cost < reflected.cost) {
      out.operation = Operation::kExpansion;
      newcomer = std::move(expanded);
    } else {
      out.operation = Operation::kReflection;
      newcomer = std::move(reflected);
    }
  } else if (reflected.cost < second_worst.cost) {
    out.operation = Operation::kReflection;
    newcomer = std::move(reflected);
  } else if (reflected.cost < worst.cost) {
    Vertex contracted = evaluator.evaluate_new(
        centroid + coeffs.contraction * (reflected.coords - centroid),
        Operation::kOutsideContraction);
    if (contracted.cost < reflected.cost) {
      out.operation = Operation::kOutsideContraction;
      newcomer = std::move(contracted);
    }
  } else {
    Vertex contracted = evaluator.evaluate_new(
        centroid - coeffs.contraction * (centroid - worst.coords),
        Operation::kInsideContraction);
    if (contracted.cost < worst.cost) {
      out.operation = Operation::kInsideContraction;
      newcomer = std::move(contracted);
    }
  }

  SimplexState next;
  next.dimension = n;
  next.iteration = state.iteration + 1;
  next.vertices = state.vertices;
  if (newcomer) {
    for (int i = 0; i < n; ++i) ++next.vertices[i].counter;
    out.removed.push_back(worst.id);
    out.added.push_back(newcomer->id);
    next.vertices[n] = std::move(*newcomer);
  } else {
    out.operation = Operation::kShrink;
    ++next.vertices[0].counter;
    for (int i = 1; i <= n; ++i) {
      const Point shrunk =
          best.coords + coeffs.shrink * (state.vertices[i].coords - best.coords);
      Vertex fresh = evaluator.evaluate_new(shrunk, Operation::kShrink);
      out.removed.push_back(state.vertices[i].id);
      out.added.push_back(fresh.id);
      next.vertices[i] = std::move(fresh);
    }
  }
  out.slot_ids = next.ids();
  out.slot_counters = next.counters();
  next.sort();
  out.state = std::move(next);
  out.evaluations = evaluator.total_calls() - calls_before;
  return out;
}

std::vector<ReevaluationEvent> reevaluation_pass(SimplexState& state, Evaluator& evaluator,
                                                 int threshold) {
  std::vector<ReevaluationEvent> events;
  for (auto& v : state.vertices) {
    if (v.counter < threshold) continue;
    ReevaluationEvent event;
    event.iteration = state.iteration;
    event.point = v.id;
    event.coords = v.coords;
    event.cost_before = v.cost;
    evaluator.remeasure(v);
    v.cost = history_mean(v.history);
    v.counter = 0;
    event.cost_after = v.cost;
    events.push_back(std::move(event));
  }
  state.sort();
  return events;
}

RunRecord run(Algorithm algorithm, const OptimizerConfig& config, const ObjectiveSpec& spec,
              std::uint64_t seed) {
  validate_run(config, spec);
  return RunEngine(algorithm, config, spec, seed).run();
}

RunRecord run_dsm(const OptimizerConfig& config, const ObjectiveSpec& spec,
                  std::uint64_t seed) {
  return run(Algorithm::kDsm, config, spec, seed);
}

RunRecord run_rdsm(const OptimizerConfig& config, const ObjectiveSpec& spec,
                   std::uint64_t seed) {
  return run(Algorithm::kRdsm, config, spec, seed);
}

}  // namespace rdsm
