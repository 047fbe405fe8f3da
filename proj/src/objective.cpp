#include "rdsm/objective.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rdsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_real(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw InvalidInput("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  return value;
}

Box uniform_box(int dimension, double lo, double hi) {
  return Box{Point::Constant(dimension, lo), Point::Constant(dimension, hi)};
}

}  // namespace

bool Box::contains_closed(const Point& x) const {
  return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all();
}

bool Box::contains_open(const Point& x) const {
  return ((x.array() > lo.array()) && (x.array() < hi.array())).all();
}

NoiseModel NoiseModel::uniform(double lower, double upper) {
  NoiseModel m;
  m.kind = Kind::kUniform;
  m.lower = lower;
  m.upper = upper;
  m.validate();
  return m;
}

NoiseModel NoiseModel::gaussian(double variance) {
  NoiseModel m;
  m.kind = Kind::kGaussian;
  m.variance = variance;
  m.validate();
  return m;
}

NoiseModel NoiseModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("noise spec must look like uniform:a,b or gaussian:v, got '" +
                       std::string(text) + "'");
  }
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  if (kind == "uniform") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw InvalidInput("uniform noise needs two bounds: uniform:a,b");
    }
    return uniform(parse_real(args.substr(0, comma), "uniform lower bound"),
                   parse_real(args.substr(comma + 1), "uniform upper bound"));
  }
  if (kind == "gaussian") {
    return gaussian(parse_real(args, "gaussian variance"));
  }
  throw InvalidInput("unknown noise kind '" + std::string(kind) + "'");
}

std::string NoiseModel::to_string() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::kUniform) {
    out << "uniform:" << lower << ',' << upper;
  } else {
    out << "gaussian:" << variance;
  }
  return out.str();
}

void NoiseModel::validate() const {
  if (kind == Kind::kUniform) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper) {
      throw InvalidInput("uniform noise needs finite bounds with lower <= upper");
    }
  } else if (!std::isfinite(variance) || variance < 0.0) {
    throw InvalidInput("gaussian noise variance must be finite and >= 0");
  }
}

double RandomStream::uniform01() {
  // 53 random bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

double sample_noise(const NoiseModel& model, RandomStream& rng) {
  if (model.kind == NoiseModel::Kind::kUniform) {
    const double u = rng.uniform01();
    return model.lower + (model.upper - model.lower) * u;
  }
  return std::sqrt(model.variance) * rng.standard_normal();
}

void ObjectiveSpec::validate() const {
  if (dimension <= 0) throw ConfigError("objective dimension must be positive");
  if (!base_function) throw ConfigError("objective '" + name + "' has no base function");
  if (bounds) {
    if (bounds->lo.size() != dimension || bounds->hi.size() != dimension) {
      throw ConfigError("bounds dimension does not match the objective");
    }
    if (!(bounds->lo.array() < bounds->hi.array()).all()) {
      throw ConfigError("bounds need lo < hi on every coordinate");
    }
  }
  if (obstacle && (obstacle->region.lo.size() != dimension ||
                   obstacle->region.hi.size() != dimension)) {
    throw ConfigError("obstacle dimension does not match the objective");
  }
  if (noise) noise->validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("cost scale must be > 0");
}

double ObjectiveSpec::noise_free_value(const Point& x) const {
  if (x.size() != dimension) {
    throw InvalidInput("point has dimension " + std::to_string(x.size()) +
                       ", objective '" + name + "' expects " + std::to_string(dimension));
  }
  if (bounds && !bounds->contains_closed(x)) return kInf;
  if (obstacle && obstacle->region.contains_open(x)) return obstacle->penalty;
  return base_function(x);
}

void EvaluationLedger::record(PointId id, double value) {
  log_.push_back(id);
  histories_[id].push_back(value);
}

const std::vector<double>& EvaluationLedger::history(PointId id) const {
  const auto it = histories_.find(id);
  if (it == histories_.end()) {
    throw InvalidInput("no evaluations recorded for point " + std::to_string(id));
  }
  return it->second;
}

void EvaluationLedger::rollback(const Mark& m) {
  while (log_.size() > m.log_size) {
    const PointId id = log_.back();
    log_.pop_back();
    auto it = histories_.find(id);
    it->second.pop_back();
    if (it->second.empty()) histories_.erase(it);
  }
}

double evaluate(const ObjectiveSpec& spec, const Point& x, EvaluationLedger& ledger,
                RandomStream& rng, PointId id) {
  const bool regular = x.size() == spec.dimension &&
                       (!spec.bounds || spec.bounds->contains_closed(x)) &&
                       (!spec.obstacle || !spec.obstacle->region.contains_open(x));
  double value = spec.noise_free_value(x);
  if (regular && spec.noise) value += sample_noise(*spec.noise, rng);
  ledger.record(id, value);
  return value;
}

double linear_gradient(double x1, double x2) { return -(x1 - x2) / 4.0 + 0.5; }

double rosenbrock(const Point& x) {
  if (x.size() < 2) throw InvalidInput("rosenbrock needs at least 2 coordinates");
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double valley = x[i + 1] - x[i] * x[i];
    const double offset = x[i] - 1.0;
    sum += 100.0 * valley * valley + offset * offset;
  }
  return sum;
}

ObjectiveSpec make_linear_gradient(bool with_obstacle) {
  ObjectiveSpec spec;
  spec.name = with_obstacle ? "linear-gradient-obstacle" : "linear-gradient";
  spec.dimension = 2;
  spec.base_function = [](const Point& x) { return linear_gradient(x[0], x[1]); };
  spec.bounds = uniform_box(2, -1.0, 1.0);
  if (with_obstacle) {
    spec.obstacle = Obstacle{uniform_box(2, -1.0, 0.0), 1e3};
  }
  return spec;
}

ObjectiveSpec make_rosenbrock(int dimension) {
  if (dimension < 2) throw ConfigError("rosenbrock needs dimension >= 2");
  ObjectiveSpec spec;
  spec.name = "rosenbrock";
  spec.dimension = dimension;
  spec.base_function = [](const Point& x) { return rosenbrock(x); };
  spec.bounds = uniform_box(dimension, -5.0, 10.0);
  return spec;
}

ObjectiveSpec make_builtin_objective(std::string_view name, int dimension) {
  if (name == "linear-gradient" || name == "linear-gradient-obstacle") {
    if (dimension != 0 && dimension != 2) {
      throw ConfigError(std::string(name) + " is two-dimensional, got --dim " +
                        std::to_string(dimension));
    }
    return make_linear_gradient(name == "linear-gradient-obstacle");
  }
  if (name == "rosenbrock") return make_rosenbrock(dimension == 0 ? 5 : dimension);
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::vector<std::string> builtin_objective_names() {
  return {"linear-gradient", "linear-gradient-obstacle", "rosenbrock"};
}

}  // namespace rdsm
