#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdsm/optimizer.hpp"
#include "rdsm/reporting.hpp"

namespace rdsm {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line, char sep = '\t') {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, sep);) out.push_back(f);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

OptimizerConfig config_2d(int iterations = 50, std::int64_t evaluations = 100) {
  OptimizerConfig c;
  c.x0 = (Point(2) << -0.75, 0.35).finished();
  c.stop.max_iterations = iterations;
  c.stop.max_evaluations = evaluations;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rdsm_reporting_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(FormatReal, ScientificTenDigits) {
  EXPECT_EQ(format_real(1000.0), "1.000000000e3");
  EXPECT_EQ(format_real(9.2146e-5), "9.214600000e-5");
  EXPECT_EQ(format_real(0.0), "0.000000000e0");
  EXPECT_EQ(format_real(-2.5), "-2.500000000e0");
  EXPECT_EQ(format_real(1.0 / 3.0), "3.333333333e-1");
  EXPECT_EQ(format_real(1.23456789012e120), "1.234567890e120");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_real(std::nan("")), "nan");
}

TEST(FormatReal, RoundTripsToTenDigits) {
  for (double v : {0.775, -0.0925, 123456.789, 1e-300, 6.02214076e23}) {
    EXPECT_NEAR(std::stod(format_real(v)), v, 1e-9 * std::abs(v));
  }
}

TEST(SimplexHistory, HandTracedFirstRow) {
  // f = (x1 - 2 x2 + 1.15)^2 from (1, 1): the first step is an accepted
  // reflection replacing vertex 2 by vertex 4.
  ObjectiveSpec spec;
  spec.name = "valley";
  spec.dimension = 2;
  spec.base_function = [](const Point& x) {
    const double t = x[0] - 2.0 * x[1] + 1.15;
    return t * t;
  };
  OptimizerConfig cfg = config_2d(1, 100);
  cfg.x0 = (Point(2) << 1.0, 1.0).finished();
  const auto text = render_simplex_history(run_dsm(cfg, spec, 1));
  const auto rows = lines(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "iter\tsimplex_id\tvertex_ids\toperation\tcounters");
  EXPECT_EQ(rows[1], "1\t1\t3;1;2→3;1;4\treflection\t1;1;0");
}

TEST(SimplexHistory, EmptyRunIsHeaderOnly) {
  const auto r = run_dsm(config_2d(0, 100), make_linear_gradient(false), 1);
  EXPECT_EQ(render_simplex_history(r), "iter\tsimplex_id\tvertex_ids\toperation\tcounters\n");
}

TEST(SimplexHistory, ObstacleRunLogsCorrection) {
  const auto r = run_rdsm(config_2d(), make_linear_gradient(true), 1);
  EXPECT_NE(render_simplex_history(r).find("\tdegeneracy-correction\t"), std::string::npos);
}

TEST(PointsDatabase, LayoutAndReconciliation) {
  auto spec = make_linear_gradient(true);
  spec.noise = NoiseModel::uniform(0.0, 0.02);
  const auto r = run_rdsm(config_2d(), spec, 4);
  const auto rows = lines(render_points_database(r));
  EXPECT_EQ(rows[0], "point_id\tx_1\tx_2\tJ\tsimplex_id\toperation");
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(fields(rows[i]).back(), "initial");
  EXPECT_EQ(static_cast<std::int64_t>(rows.size() - 1),
            r.total_evaluations - static_cast<std::int64_t>(r.reevaluations.size()));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f[0], std::to_string(i));
  }
}

TEST(PointsDatabase, ObstaclePenaltyColumn) {
  // The start lies inside the obstacle.
  OptimizerConfig cfg = config_2d(0, 100);
  cfg.x0 = (Point(2) << -0.5, -0.5).finished();
  const auto rows = lines(render_points_database(run_dsm(cfg, make_linear_gradient(true), 1)));
  EXPECT_EQ(fields(rows[1])[3], "1.000000000e3");
}

TEST(ReevaluationHistory, NoiseFreeRowsUnchanged) {
  const auto r = run_rdsm(config_2d(), make_linear_gradient(false), 1);
  const auto rows = lines(render_reevaluation_history(r));
  EXPECT_EQ(rows[0], "iter\tpoint_id\tx_1\tx_2\tJ_before\tJ_after");
  ASSERT_GT(rows.size(), 1u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    EXPECT_EQ(f[4], f[5]);
  }
}

TEST(ReevaluationHistory, DsmRunIsHeaderOnly) {
  const auto r = run_dsm(config_2d(), make_linear_gradient(false), 1);
  EXPECT_EQ(lines(render_reevaluation_history(r)).size(), 1u);
}

TEST(ReevaluationHistory, UniformNoiseMovesLessThanItsSpan) {
  auto spec = make_linear_gradient(false);
  spec.noise = NoiseModel::uniform(0.0, 0.02);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = run_rdsm(config_2d(), spec, seed);
    for (const auto& e : r.reevaluations) {
      EXPECT_LE(std::abs(e.cost_after - e.cost_before), 0.02);
    }
  }
}

TEST(LearningCurve, OneRowPerEvaluationAndMonotoneBest) {
  const auto r = run_rdsm(config_2d(), make_linear_gradient(true), 1);
  const auto rows = lines(render_learning_curve_csv(r));
  EXPECT_EQ(rows[0], "evaluation_index,J,best_so_far_J");
  EXPECT_EQ(static_cast<std::int64_t>(rows.size() - 1), r.total_evaluations);
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i], ',');
    EXPECT_EQ(f[0], std::to_string(i));
    const double best = std::stod(f[2]);
    EXPECT_LE(best, last);
    last = best;
  }
}

TEST(LearningCurve, ReferenceRunEndsBelowThreshold) {
  const auto r = run_dsm(config_2d(), make_linear_gradient(false), 1);
  const auto rows = lines(render_learning_curve_csv(r));
  EXPECT_LE(std::stod(fields(rows.back(), ',')[2]), 1e-3);
}

TEST(Svg, LearningCurveAndTrajectory) {
  const auto r = run_rdsm(config_2d(), make_linear_gradient(true), 1);
  const auto curve = render_learning_curve_svg(r);
  EXPECT_EQ(curve.rfind("<svg", 0), 0u);
  EXPECT_NE(curve.find("<path d=\"M"), std::string::npos);
  EXPECT_NE(curve.find("<circle"), std::string::npos);
  EXPECT_NE(curve.find("</svg>"), std::string::npos);
  const auto traj = render_trajectory_svg(r);
  EXPECT_NE(traj.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(traj.find("<polygon"), std::string::npos);

  OptimizerConfig cfg;
  cfg.x0 = Point::Zero(3);
  const auto r3 = run_dsm(cfg, make_rosenbrock(3), 1);
  EXPECT_THROW(render_trajectory_svg(r3), InvalidInput);
}

TEST(Bundle, WritesAllFilesAndTwinsMatch) {
  const auto dir = scratch_dir("bundle");
  const auto r = run_rdsm(config_2d(), make_linear_gradient(true), 1);
  const auto bundle = write_output_bundle(r, dir, true);
  EXPECT_EQ(bundle.files.size(), 8u);
  for (const char* name : {"SimplexHistory.txt", "SimplexHistory.dat", "PointsDatabase.txt",
                           "PointsDatabase.dat", "ReevaluationHistory.txt", "LearningCurve.csv",
                           "LearningCurve.svg", "SimplexTrajectory.svg"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_FALSE(fs::exists(dir / "ReevaluationHistory.dat"));
  EXPECT_EQ(slurp(dir / "SimplexHistory.txt"), slurp(dir / "SimplexHistory.dat"));
  EXPECT_EQ(slurp(dir / "PointsDatabase.txt"), slurp(dir / "PointsDatabase.dat"));
  for (const auto& entry : fs::directory_iterator(dir)) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }
  fs::remove_all(dir);
}

TEST(Bundle, IdenticalRunsGiveIdenticalBytes) {
  auto spec = make_linear_gradient(false);
  spec.noise = NoiseModel::gaussian(1e-4);
  const auto a = scratch_dir("same_a");
  const auto b = scratch_dir("same_b");
  write_output_bundle(run_rdsm(config_2d(), spec, 5), a);
  write_output_bundle(run_rdsm(config_2d(), spec, 5), b);
  for (const char* name : {"SimplexHistory.txt", "PointsDatabase.txt", "ReevaluationHistory.txt",
                           "LearningCurve.csv", "LearningCurve.svg"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Bundle, UnwritableLocationReportsPath) {
  const auto dir = scratch_dir("blocked");
  fs::create_directories(dir);
  const fs::path file = dir / "plain-file";
  std::ofstream(file) << "x";
  const auto r = run_dsm(config_2d(0, 100), make_linear_gradient(false), 1);
  try {
    write_output_bundle(r, file / "sub");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("plain-file"), std::string::npos);
  }
  EXPECT_THROW(write_simplex_history(r, file / "x.txt"), IoError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace rdsm
