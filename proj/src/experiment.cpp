#include "rdsm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "rdsm/optimizer.hpp"

namespace rdsm {

namespace {

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string point_text(const Point& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", x[i]);
    out += buf;
  }
  return out + ")";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

// Reference scenario settings.
const Point& start_2d() {
  static const Point x0 = (Point(2) << -0.75, 0.35).finished();
  return x0;
}

const Point& start_rosenbrock() {
  static const Point x0 =
      (Point(5) << -0.9598, -1.66907, -0.19862, -3.61086, -3.77915).finished();
  return x0;
}

ExperimentConfig scenario_2d(Algorithm algorithm, const std::string& objective) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.objective = objective;
  c.x0 = {start_2d()[0], start_2d()[1]};
  c.max_iterations = 50;
  c.max_evaluations = 100;
  return c;
}

ExperimentConfig scenario_rosenbrock(Algorithm algorithm) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.objective = "rosenbrock";
  c.dimension = 5;
  c.x0.assign(start_rosenbrock().data(), start_rosenbrock().data() + 5);
  c.max_iterations = 500;
  c.max_evaluations = 1000000;
  c.coefficients.edge_threshold = 1e-5;
  c.coefficients.volume_threshold = 1e-5;
  c.scale = 1e-4;
  return c;
}

RunRecord run_config(const ExperimentConfig& c) {
  return run(c.algorithm, c.optimizer_config(), c.objective_spec(), c.seed);
}

ScenarioCheck check(std::string label, std::string measured, bool passed) {
  return ScenarioCheck{std::move(label), std::move(measured), passed};
}

double distance_inf(const Point& a, const Point& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

ScenarioReport no_obstacle() {
  ScenarioReport r{"2d-no-obstacle", {}, {}};
  const auto rec = run_config(scenario_2d(Algorithm::kDsm, "linear-gradient"));
  const Point target = (Point(2) << 1.0, -1.0).finished();
  r.checks.push_back(check("DSM endpoint within 0.05 of (1, -1)", point_text(rec.best.coords),
                           distance_inf(rec.best.coords, target) <= 0.05));
  r.checks.push_back(check("DSM J <= 1e-3", short_real(rec.best.cost), rec.best.cost <= 1e-3));
  r.checks.push_back(check("DSM evaluations <= 100", std::to_string(rec.total_evaluations),
                           rec.total_evaluations <= 100));
  return r;
}

ScenarioReport obstacle() {
  ScenarioReport r{"2d-obstacle", {}, {}};
  const auto dsm = run_config(scenario_2d(Algorithm::kDsm, "linear-gradient-obstacle"));
  const auto rdsm = run_config(scenario_2d(Algorithm::kRdsm, "linear-gradient-obstacle"));
  std::size_t corrections = 0;
  for (const auto& e : rdsm.degeneracies) corrections += e.added.empty() ? 0 : 1;
  r.checks.push_back(check("DSM J >= 0.1", short_real(dsm.best.cost), dsm.best.cost >= 0.1));
  r.checks.push_back(
      check("rDSM J <= 0.05", short_real(rdsm.best.cost), rdsm.best.cost <= 0.05));
  r.checks.push_back(check("rDSM logged >= 1 degeneracy correction",
                           std::to_string(corrections), corrections >= 1));
  return r;
}

ScenarioReport noise(const std::string& name, const NoiseModel& model, bool separation) {
  ScenarioReport r{name, {}, {}};
  double means[2] = {0.0, 0.0};
  for (Algorithm a : {Algorithm::kDsm, Algorithm::kRdsm}) {
    auto c = scenario_2d(a, "linear-gradient");
    c.noise = model;
    c.repeat = 20;
    auto summary = run_replications(c);
    means[a == Algorithm::kRdsm] = summary.cost_mean;
    r.summaries.emplace_back(a, std::move(summary));
  }
  if (separation) {
    r.checks.push_back(check("rDSM mean true J <= 0.05", short_real(means[1]), means[1] <= 0.05));
    r.checks.push_back(check("DSM mean true J >= 0.05", short_real(means[0]), means[0] >= 0.05));
  }
  r.checks.push_back(check("rDSM mean true J < DSM mean true J",
                           short_real(means[1]) + " vs " + short_real(means[0]),
                           means[1] < means[0]));
  return r;
}

ScenarioReport rosenbrock_5d() {
  ScenarioReport r{"rosenbrock-5d", {}, {}};
  const auto dsm = run_config(scenario_rosenbrock(Algorithm::kDsm));
  const auto rdsm = run_config(scenario_rosenbrock(Algorithm::kRdsm));
  const Point ones = Point::Ones(5);
  const double rdsm_j = make_rosenbrock(5).noise_free_value(rdsm.best.coords);
  r.checks.push_back(check("rDSM endpoint within 1e-2 of ones", point_text(rdsm.best.coords),
                           distance_inf(rdsm.best.coords, ones) <= 1e-2));
  r.checks.push_back(check("rDSM unscaled J <= 1e-6", short_real(rdsm_j), rdsm_j <= 1e-6));
  r.checks.push_back(check("DSM endpoint not within 1e-2 of ones", point_text(dsm.best.coords),
                           distance_inf(dsm.best.coords, ones) > 1e-2));
  r.checks.push_back(check("rDSM evaluations >= DSM evaluations",
                           std::to_string(rdsm.total_evaluations) + " vs " +
                               std::to_string(dsm.total_evaluations),
                           rdsm.total_evaluations >= dsm.total_evaluations));
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  coefficients.validate();
  if (x0.empty()) throw ConfigError("a starting point (x0) is required");
  if (dimension < 0) throw ConfigError("dimension must be >= 0");
  if (dimension != 0 && static_cast<std::size_t>(dimension) != x0.size()) {
    throw ConfigError("x0 has " + std::to_string(x0.size()) + " coordinates but dimension is " +
                      std::to_string(dimension));
  }
  if (max_iterations < 0) throw ConfigError("max-iter must be >= 0");
  if (max_evaluations <= 0) throw ConfigError("max-eval must be > 0");
  if (repeat < 1) throw ConfigError("repeat must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale must be > 0");
  if (noise) noise->validate();
  objective_spec();
}

ObjectiveSpec ExperimentConfig::objective_spec() const {
  const int dim = dimension != 0 ? dimension : static_cast<int>(x0.size());
  ObjectiveSpec spec = make_builtin_objective(objective, dim);
  spec.noise = noise;
  spec.scale = scale;
  return spec;
}

OptimizerConfig ExperimentConfig::optimizer_config() const {
  OptimizerConfig c;
  c.coefficients = coefficients;
  c.stop.max_iterations = max_iterations;
  c.stop.max_evaluations = max_evaluations;
  c.x0 = Eigen::Map<const Point>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  c.initial_rule = initial_rule;
  return c;
}

std::string ExperimentConfig::to_config_text() const {
  std::ostringstream out;
  out << "algorithm = " << to_string(algorithm) << '\n'
      << "objective = \"" << objective << "\"\n"
      << "dim = " << dimension << '\n'
      << "x0 = \"" << format_real_list(x0) << "\"\n"
      << "max-iter = " << max_iterations << '\n'
      << "max-eval = " << max_evaluations << '\n'
      << "alpha = " << real_text(coefficients.reflection) << '\n'
      << "gamma = " << real_text(coefficients.expansion) << '\n'
      << "rho = " << real_text(coefficients.contraction) << '\n'
      << "sigma = " << real_text(coefficients.shrink) << '\n'
      << "theta-e = " << real_text(coefficients.edge_threshold) << '\n'
      << "theta-v = " << real_text(coefficients.volume_threshold) << '\n'
      << "init-coeff = " << real_text(coefficients.initial_simplex) << '\n'
      << "init-rule = " << to_string(initial_rule) << '\n'
      << "noise = \"" << (noise ? noise->to_string() : "none") << "\"\n"
      << "seed = " << seed << '\n'
      << "repeat = " << repeat << '\n'
      << "scale = " << real_text(scale) << '\n'
      << "out-dir = \"" << out_dir << "\"\n"
      << "emit-trajectory = " << (emit_trajectory ? "true" : "false") << '\n';
  return out.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      if (key == "algorithm") c.algorithm = parse_algorithm(value);
      else if (key == "objective") c.objective = value;
      else if (key == "dim") c.dimension = static_cast<int>(to_integer(key, value));
      else if (key == "x0") c.x0 = parse_real_list(value);
      else if (key == "max-iter") c.max_iterations = static_cast<int>(to_integer(key, value));
      else if (key == "max-eval") c.max_evaluations = to_integer(key, value);
      else if (key == "alpha") c.coefficients.reflection = to_real(key, value);
      else if (key == "gamma") c.coefficients.expansion = to_real(key, value);
      else if (key == "rho") c.coefficients.contraction = to_real(key, value);
      else if (key == "sigma") c.coefficients.shrink = to_real(key, value);
      else if (key == "theta-e") c.coefficients.edge_threshold = to_real(key, value);
      else if (key == "theta-v") c.coefficients.volume_threshold = to_real(key, value);
      else if (key == "init-coeff") c.coefficients.initial_simplex = to_real(key, value);
      else if (key == "init-rule") c.initial_rule = parse_initial_simplex_rule(value);
      else if (key == "noise") {
        if (value == "none") c.noise.reset();
        else c.noise = NoiseModel::parse(value);
      } else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_integer(key, value));
      else if (key == "repeat") c.repeat = static_cast<int>(to_integer(key, value));
      else if (key == "scale") c.scale = to_real(key, value);
      else if (key == "out-dir") c.out_dir = value;
      else if (key == "emit-trajectory") c.emit_trajectory = to_bool(key, value);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma - start));
    out.push_back(to_real("x0", item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_real_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += real_text(values[i]);
  }
  return out;
}

void mean_and_variance(const std::vector<double>& values, double& mean, double& variance) {
  mean = 0.0;
  variance = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return;
  for (double v : values) variance += (v - mean) * (v - mean);
  variance /= static_cast<double>(values.size() - 1);
}

double ReplicationSummary::cost_stddev() const { return std::sqrt(cost_variance); }

std::string ReplicationSummary::to_csv() const {
  const Eigen::Index n = endpoint_mean.size();
  std::string out = "run,seed,";
  for (Eigen::Index i = 1; i <= n; ++i) out += "x_" + std::to_string(i) + ',';
  out += "J,iters,evals\n";
  for (const auto& r : runs) {
    out += std::to_string(r.run) + ',' + std::to_string(r.seed) + ',';
    for (Eigen::Index i = 0; i < r.endpoint.size(); ++i) out += real_text(r.endpoint[i]) + ',';
    out += real_text(r.true_cost) + ',' + std::to_string(r.iterations) + ',' +
           std::to_string(r.evaluations) + '\n';
  }
  return out;
}

ReplicationSummary run_replications(const ExperimentConfig& config,
                                    std::vector<RunRecord>* records) {
  config.validate();
  const ObjectiveSpec spec = config.objective_spec();
  const OptimizerConfig opt = config.optimizer_config();
  ReplicationSummary summary;
  for (int k = 0; k < config.repeat; ++k) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k);
    RunRecord rec = run(config.algorithm, opt, spec, seed);
    summary.runs.push_back(RunSummary{k + 1, seed, rec.best.coords,
                                      spec.noise_free_value(rec.best.coords), rec.iterations,
                                      rec.total_evaluations});
    if (records) records->push_back(std::move(rec));
  }
  const Eigen::Index n = spec.dimension;
  summary.endpoint_mean = Point::Zero(n);
  summary.endpoint_variance = Point::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> column;
    for (const auto& r : summary.runs) column.push_back(r.endpoint[i]);
    mean_and_variance(column, summary.endpoint_mean[i], summary.endpoint_variance[i]);
  }
  std::vector<double> costs;
  for (const auto& r : summary.runs) costs.push_back(r.true_cost);
  mean_and_variance(costs, summary.cost_mean, summary.cost_variance);
  return summary;
}

bool ScenarioReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<std::string> scenario_names() {
  return {"2d-no-obstacle",       "2d-obstacle",          "noise-uniform-0.01",
          "noise-uniform-0.02",   "noise-gaussian-0.005", "noise-gaussian-0.01",
          "rosenbrock-5d"};
}

std::vector<ScenarioReport> reproduce(const std::string& only) {
  std::vector<ScenarioReport> reports;
  for (const auto& name : scenario_names()) {
    if (name.compare(0, only.size(), only) != 0) continue;
    if (name == "2d-no-obstacle") reports.push_back(no_obstacle());
    else if (name == "2d-obstacle") reports.push_back(obstacle());
    else if (name == "noise-uniform-0.01")
      reports.push_back(noise(name, NoiseModel::uniform(0.0, 0.01), false));
    else if (name == "noise-uniform-0.02")
      reports.push_back(noise(name, NoiseModel::uniform(0.0, 0.02), true));
    else if (name == "noise-gaussian-0.005")
      reports.push_back(noise(name, NoiseModel::gaussian(0.005), false));
    else if (name == "noise-gaussian-0.01")
      reports.push_back(noise(name, NoiseModel::gaussian(0.01), false));
    else if (name == "rosenbrock-5d") reports.push_back(rosenbrock_5d());
  }
  if (reports.empty()) throw ConfigError("no scenario matches '" + only + "'");
  return reports;
}

std::string format_report(const std::vector<ScenarioReport>& reports) {
  std::ostringstream out;
  int passed = 0, total = 0;
  for (const auto& r : reports) {
    out << r.name << '\n';
    for (const auto& [algorithm, s] : r.summaries) {
      out << "  " << (algorithm == Algorithm::kDsm ? "DSM " : "rDSM") << " endpoint "
          << point_text(s.endpoint_mean) << "  J " << short_real(s.cost_mean) << " +- "
          << short_real(s.cost_variance) << " (variance), std " << short_real(s.cost_stddev())
          << ", runs " << s.runs.size() << '\n';
    }
    for (const auto& c : r.checks) {
      ++total;
      passed += c.passed;
      out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.label << ": " << c.measured
          << '\n';
    }
  }
  out << passed << '/' << total << " checks passed\n";
  return out.str();
}

}  // namespace rdsm
