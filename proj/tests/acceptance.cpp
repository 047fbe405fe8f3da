// Acceptance checks: one PASS/FAIL line per criterion. Usage:
//   rdsm_acceptance <path-to-rdsm-cli>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rdsm/experiment.hpp"
#include "rdsm/optimizer.hpp"

using namespace rdsm;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kVolumeRelTol = 1e-9;
constexpr double kPerimeterRelTol = 1e-8;
constexpr double kApexTol = 1e-6;
constexpr double kEndpointTol2d = 0.05;
constexpr double kCostTol2d = 1e-3;
constexpr double kObstacleDsmFloor = 0.1;
constexpr double kObstacleRdsmCeiling = 0.05;
constexpr double kNoiseSeparation = 0.05;
constexpr double kRosenbrockEndpointTol = 1e-2;
constexpr double kRosenbrockCostTol = 1e-6;
constexpr int kNoiseRuns = 20;

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d [%s] %s: %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Point p2(double a, double b) { return (Point(2) << a, b).finished(); }

OptimizerConfig config_2d() {
  OptimizerConfig c;
  c.x0 = p2(-0.75, 0.35);
  c.stop.max_iterations = 50;
  c.stop.max_evaluations = 100;
  return c;
}

OptimizerConfig config_rosenbrock() {
  OptimizerConfig c;
  c.x0 = (Point(5) << -0.9598, -1.66907, -0.19862, -3.61086, -3.77915).finished();
  c.stop.max_iterations = 500;
  c.stop.max_evaluations = 1000000;
  c.coefficients.edge_threshold = 1e-5;
  c.coefficients.volume_threshold = 1e-5;
  return c;
}

ObjectiveSpec rosenbrock_scaled() {
  auto spec = make_rosenbrock(5);
  spec.scale = 1e-4;
  return spec;
}

void criterion_1() {
  testing::Generator gen(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    const auto v = gen.healthy_simplex(n);
    const double oracle = testing::cayley_menger_volume(v);
    worst = std::max(worst, std::abs(volume(v) - oracle) / oracle);
  }
  report(1, worst <= kVolumeRelTol, "volume matches Cayley-Menger on 1000 simplices, n=2..5",
         "max relative error " + num(worst));
}

void criterion_2() {
  const auto r =
      detect_degeneracy(std::vector<Point>{p2(0, 0), p2(1000, 0), p2(0, 1)}, 0.1, 0.1);
  report(2, r.edge_degenerate() && !r.volume_degenerate(),
         "(0,0),(1000,0),(0,1) is edge- but not volume-degenerate",
         "classification " + std::string(to_string(r.classification)) + ", eps_e " +
             num(r.epsilon_e) + ", eps_v " + num(r.epsilon_v));
}

void criterion_3() {
  testing::Generator gen(1003);
  double perim_err = 0.0, apex_err = 0.0;
  int no_gain = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 4;
    const auto v = gen.degenerate_simplex(n);
    const auto costs = gen.costs(n + 1);
    const auto r = correct_degeneracy(v, costs, 0.1, 0.1);
    perim_err = std::max(perim_err, std::abs(perimeter(r.vertices) - perimeter(v)) / perimeter(v));
    if (!(volume(r.vertices) > volume(v))) ++no_gain;
    if (n == 2) {
      // Replay the sequential moves against the analytic apex.
      auto current = v;
      const double target = perimeter(v);
      for (std::size_t slot : r.moved) {
        const Point& a = current[(slot + 1) % 3];
        const Point& b = current[(slot + 2) % 3];
        const Point apex = testing::ellipse_apex(a, b, target - (a - b).norm(), current[slot]);
        apex_err = std::max(apex_err, (r.vertices[slot] - apex).norm());
        current[slot] = r.vertices[slot];
      }
    }
  }
  report(3, perim_err <= kPerimeterRelTol && no_gain == 0 && apex_err <= kApexTol,
         "correction on 500 degenerate simplices, n=2..5",
         "max perimeter rel error " + num(perim_err) + ", without volume gain " +
             std::to_string(no_gain) + ", max 2D apex distance " + num(apex_err));
}

void criterion_4() {
  bool all = true;
  std::string detail;
  const auto compare = [&](const char* label, OptimizerConfig cfg, const ObjectiveSpec& spec) {
    const auto dsm = run_dsm(cfg, spec, 1);
    cfg.coefficients.edge_threshold = 0.0;
    cfg.coefficients.volume_threshold = 0.0;
    cfg.reevaluation_factor = std::numeric_limits<double>::infinity();
    const auto rdsm = run_rdsm(cfg, spec, 1);
    const bool same = dsm.nelder_mead_operations() == rdsm.nelder_mead_operations() &&
                      dsm.best.coords == rdsm.best.coords && dsm.best.cost == rdsm.best.cost;
    all = all && same;
    detail += std::string(detail.empty() ? "" : ", ") + label + " " +
              std::to_string(dsm.nelder_mead_operations().size()) + " ops " +
              (same ? "identical" : "differ");
  };
  compare("linear-gradient", config_2d(), make_linear_gradient(false));
  compare("linear-gradient-obstacle", config_2d(), make_linear_gradient(true));
  compare("rosenbrock-5d", config_rosenbrock(), rosenbrock_scaled());
  report(4, all, "rDSM with both features off reproduces DSM", detail);
}

void criterion_5() {
  const auto r = run_dsm(config_2d(), make_linear_gradient(false), 1);
  const double dist = (r.best.coords - p2(1, -1)).lpNorm<Eigen::Infinity>();
  report(5, dist <= kEndpointTol2d && r.best.cost <= kCostTol2d && r.total_evaluations <= 100,
         "DSM 2D no obstacle reaches (1,-1)",
         "endpoint (" + num(r.best.coords[0]) + ", " + num(r.best.coords[1]) + "), J " +
             num(r.best.cost) + ", evaluations " + std::to_string(r.total_evaluations));
}

void criterion_6() {
  const auto spec = make_linear_gradient(true);
  const auto dsm = run_dsm(config_2d(), spec, 1);
  const auto rdsm = run_rdsm(config_2d(), spec, 1);
  std::size_t corrections = 0;
  for (const auto& e : rdsm.degeneracies) corrections += e.added.empty() ? 0 : 1;
  report(6,
         dsm.best.cost >= kObstacleDsmFloor && rdsm.best.cost <= kObstacleRdsmCeiling &&
             corrections >= 1,
         "obstacle: DSM stalls, rDSM gets through",
         "DSM J " + num(dsm.best.cost) + ", rDSM J " + num(rdsm.best.cost) + ", corrections " +
             std::to_string(corrections));
}

double mean_true_cost(Algorithm algorithm, const NoiseModel& noise) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.objective = "linear-gradient";
  c.x0 = {-0.75, 0.35};
  c.max_iterations = 50;
  c.max_evaluations = 100;
  c.noise = noise;
  c.seed = 1;
  c.repeat = kNoiseRuns;
  return run_replications(c).cost_mean;
}

void criterion_7() {
  bool pass = true;
  std::string detail;
  const std::pair<const char*, NoiseModel> models[] = {
      {"U[0,0.02]", NoiseModel::uniform(0.0, 0.02)},
      {"U[0,0.01]", NoiseModel::uniform(0.0, 0.01)},
      {"N(0,0.005)", NoiseModel::gaussian(0.005)},
      {"N(0,0.01)", NoiseModel::gaussian(0.01)}};
  for (const auto& [label, model] : models) {
    const double dsm = mean_true_cost(Algorithm::kDsm, model);
    const double rdsm = mean_true_cost(Algorithm::kRdsm, model);
    bool ok = rdsm < dsm;
    if (std::string(label) == "U[0,0.02]") {
      ok = ok && rdsm <= kNoiseSeparation && dsm >= kNoiseSeparation;
    }
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + label + " DSM " + num(dsm) + " rDSM " +
              num(rdsm) + (ok ? " ok" : " NOT ok");
  }
  report(7, pass, "noise study, mean true J over 20 seeds", detail);
}

void criterion_8() {
  const auto spec = rosenbrock_scaled();
  const auto dsm = run_dsm(config_rosenbrock(), spec, 1);
  const auto rdsm = run_rdsm(config_rosenbrock(), spec, 1);
  const Point ones = Point::Ones(5);
  const double rdsm_dist = (rdsm.best.coords - ones).lpNorm<Eigen::Infinity>();
  const double dsm_dist = (dsm.best.coords - ones).lpNorm<Eigen::Infinity>();
  const double rdsm_j = rosenbrock(rdsm.best.coords);
  report(8,
         rdsm_dist <= kRosenbrockEndpointTol && rdsm_j <= kRosenbrockCostTol &&
             dsm_dist > kRosenbrockEndpointTol &&
             rdsm.total_evaluations >= dsm.total_evaluations,
         "5D Rosenbrock: rDSM converges, DSM does not",
         "rDSM distance " + num(rdsm_dist) + " J " + num(rdsm_j) + " evals " +
             std::to_string(rdsm.total_evaluations) + "; DSM distance " + num(dsm_dist) +
             " J " + num(rosenbrock(dsm.best.coords)) + " evals " +
             std::to_string(dsm.total_evaluations) + "; corrections " +
             std::to_string(rdsm.degeneracies.size()));
}

void criterion_9() {
  bool trigger_ok = true;
  for (int n : {1, 2, 3, 5}) {
    const int threshold = static_cast<int>(std::ceil(1.5 * n));
    OptimizerConfig cfg;
    if (cfg.reevaluation_threshold(n) != threshold) trigger_ok = false;
    ObjectiveSpec spec;
    spec.name = "flat";
    spec.dimension = n;
    spec.base_function = [](const Point& x) { return x.sum(); };
    Evaluator ev(spec, 1);
    SimplexState s;
    s.dimension = n;
    for (int i = 0; i <= n; ++i) {
      Point p = Point::Zero(n);
      if (i > 0) p[i - 1] = 0.1;
      s.vertices.push_back(ev.evaluate_new(p, Operation::kInitial));
    }
    s.sort();
    for (auto& v : s.vertices) v.counter = threshold - 1;
    if (!reevaluation_pass(s, ev, threshold).empty()) trigger_ok = false;
    s.vertices.back().counter = threshold;
    if (reevaluation_pass(s, ev, threshold).size() != 1) trigger_ok = false;
  }

  // Noise-free trigger keeps cost and best identity.
  bool unchanged = true;
  {
    const auto spec = make_linear_gradient(false);
    Evaluator ev(spec, 1);
    SimplexState s;
    s.dimension = 2;
    for (const auto& p : {p2(0.3, -0.1), p2(-0.2, 0.1), p2(0.1, 0.7)}) {
      s.vertices.push_back(ev.evaluate_new(p, Operation::kInitial));
    }
    s.sort();
    const auto before = s.vertices;
    for (auto& v : s.vertices) v.counter = 3;
    const auto events = reevaluation_pass(s, ev, 3);
    unchanged = events.size() == 3 && s.best().id == before.front().id;
    for (std::size_t i = 0; i < before.size(); ++i) {
      unchanged = unchanged && s.vertices[i].cost == before[i].cost;
    }
  }

  // History {0.10, 0.12} plus a fresh 0.11 stores 0.11.
  double stored = 0.0;
  {
    auto next = std::make_shared<int>(0);
    ObjectiveSpec spec;
    spec.name = "sequence";
    spec.dimension = 2;
    spec.base_function = [next](const Point&) {
      const double values[] = {0.10, 0.5, 0.6, 0.12, 0.11};
      return values[(*next)++];
    };
    Evaluator ev(spec, 1);
    SimplexState s;
    s.dimension = 2;
    for (const auto& p : {p2(0, 0), p2(1, 0), p2(0, 1)}) {
      s.vertices.push_back(ev.evaluate_new(p, Operation::kInitial));
    }
    ev.remeasure(s.vertices[0]);
    s.vertices[0].counter = 3;
    s.sort();
    reevaluation_pass(s, ev, 3);
    for (const auto& v : s.vertices) {
      if (v.id == 1) stored = v.cost;
    }
  }
  report(9, trigger_ok && unchanged && stored == 0.11, "reevaluation trigger and averaging",
         std::string("trigger at ceil(1.5n) ") + (trigger_ok ? "ok" : "wrong") +
             ", noise-free unchanged " + (unchanged ? "yes" : "no") + ", stored mean " +
             num(stored) + (stored == 0.11 ? " (exact)" : " (inexact)"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void criterion_10(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "rdsm_acceptance_repro";
  fs::remove_all(root);
  bool ran = true;
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "\"" + cli +
                            "\" --algorithm rdsm --objective linear-gradient-obstacle "
                            "--x0 -0.75,0.35 --max-iter 50 --max-eval 100 "
                            "--noise uniform:0,0.02 --seed 9 --out-dir \"" +
                            (root / sub).string() + "\" > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  bool same = ran;
  std::string detail = ran ? "" : "CLI invocation failed";
  for (const char* name :
       {"SimplexHistory.txt", "PointsDatabase.txt", "ReevaluationHistory.txt",
        "LearningCurve.csv"}) {
    if (!ran) break;
    const auto a = slurp(root / "a" / name);
    const bool eq = !a.empty() && a == slurp(root / "b" / name);
    same = same && eq;
    detail += std::string(detail.empty() ? "" : ", ") + name + (eq ? " identical" : " differ");
  }
  fs::remove_all(root);
  report(10, same, "identical invocations give byte-identical archives", detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: rdsm_acceptance <path-to-rdsm-cli>\n";
    return 2;
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(argv[1]);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
