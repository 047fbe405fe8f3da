#include "rdsm/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace rdsm {

namespace {

constexpr std::array<std::pair<Operation, std::string_view>, 8> kOperationLabels{{
    {Operation::kInitial, "initial"},
    {Operation::kReflection, "reflection"},
    {Operation::kExpansion, "expansion"},
    {Operation::kOutsideContraction, "outside-contraction"},
    {Operation::kInsideContraction, "inside-contraction"},
    {Operation::kShrink, "shrink"},
    {Operation::kDegeneracyCorrection, "degeneracy-correction"},
    {Operation::kReevaluation, "reevaluation"},
}};

bool vertex_less(const Vertex& a, const Vertex& b) {
  if (a.cost < b.cost) return true;
  if (b.cost < a.cost) return false;
  return a.id < b.id;
}

}  // namespace

std::string_view to_string(Operation op) {
  for (const auto& [value, label] : kOperationLabels) {
    if (value == op) return label;
  }
  return "unknown";
}

Operation parse_operation(std::string_view label) {
  for (const auto& [value, text] : kOperationLabels) {
    if (text == label) return value;
  }
  throw InvalidInput("unknown operation label '" + std::string(label) + "'");
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kDsm ? "dsm" : "rdsm";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "dsm") return Algorithm::kDsm;
  if (name == "rdsm") return Algorithm::kRdsm;
  throw InvalidInput("unknown algorithm '" + std::string(name) +
                     "' (expected dsm or rdsm)");
}

std::string_view to_string(InitialSimplexRule rule) {
  switch (rule) {
    case InitialSimplexRule::kAutomatic: return "auto";
    case InitialSimplexRule::kRelative: return "relative";
    case InitialSimplexRule::kDomain: return "domain";
  }
  return "unknown";
}

InitialSimplexRule parse_initial_simplex_rule(std::string_view name) {
  if (name == "auto") return InitialSimplexRule::kAutomatic;
  if (name == "relative") return InitialSimplexRule::kRelative;
  if (name == "domain") return InitialSimplexRule::kDomain;
  throw InvalidInput("unknown initial simplex rule '" + std::string(name) +
                     "' (expected auto, relative or domain)");
}

std::string_view to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::kNone: return "none";
    case Degeneracy::kEdge: return "edge";
    case Degeneracy::kVolume: return "volume";
    case Degeneracy::kBoth: return "both";
  }
  return "unknown";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxIterations: return "max-iterations";
    case StopReason::kMaxEvaluations: return "max-evaluations";
    case StopReason::kCostTolerance: return "cost-tolerance";
    case StopReason::kSimplexTolerance: return "simplex-tolerance";
  }
  return "unknown";
}

void SimplexState::sort() {
  // NaN costs would break strict weak ordering.
  for (auto& v : vertices) {
    if (std::isnan(v.cost)) v.cost = std::numeric_limits<double>::infinity();
  }
  std::sort(vertices.begin(), vertices.end(), vertex_less);
}

bool SimplexState::is_sorted() const {
  return std::is_sorted(vertices.begin(), vertices.end(), vertex_less);
}

std::vector<Point> SimplexState::points() const {
  std::vector<Point> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.coords);
  return out;
}

std::vector<double> SimplexState::costs() const {
  std::vector<double> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.cost);
  return out;
}

std::vector<PointId> SimplexState::ids() const {
  std::vector<PointId> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.id);
  return out;
}

std::vector<int> SimplexState::counters() const {
  std::vector<int> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.counter);
  return out;
}

void CoefficientSet::validate() const {
  if (!(reflection > 0.0)) throw ConfigError("reflection coefficient must be > 0");
  if (!(expansion > 1.0)) throw ConfigError("expansion coefficient must be > 1");
  if (!(contraction > 0.0 && contraction < 1.0))
    throw ConfigError("contraction coefficient must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0))
    throw ConfigError("shrink coefficient must lie in (0, 1)");
  if (!(edge_threshold >= 0.0 && edge_threshold < 1.0))
    throw ConfigError("edge threshold must lie in [0, 1)");
  if (!(volume_threshold >= 0.0 && volume_threshold < 1.0))
    throw ConfigError("volume threshold must lie in [0, 1)");
  if (!(initial_simplex > 0.0))
    throw ConfigError("initial simplex coefficient must be > 0");
}

void StopCriteria::validate() const {
  if (max_iterations < 0) throw ConfigError("max iterations must be >= 0");
  if (max_evaluations <= 0) throw ConfigError("max evaluations must be > 0");
  if (cost_tolerance && !(*cost_tolerance >= 0.0))
    throw ConfigError("cost tolerance must be >= 0");
  if (simplex_tolerance && !(*simplex_tolerance >= 0.0))
    throw ConfigError("simplex tolerance must be >= 0");
}

int OptimizerConfig::reevaluation_threshold(int dimension) const {
  const double t = std::ceil(reevaluation_factor * dimension);
  if (!std::isfinite(t) || t > std::numeric_limits<int>::max()) {
    return std::numeric_limits<int>::max();
  }
  return std::max(1, static_cast<int>(t));
}

std::vector<Operation> RunRecord::nelder_mead_operations() const {
  std::vector<Operation> ops;
  for (const auto& row : rows) {
    if (row.operation != Operation::kDegeneracyCorrection &&
        row.operation != Operation::kReevaluation) {
      ops.push_back(row.operation);
    }
  }
  return ops;
}

}  // namespace rdsm
