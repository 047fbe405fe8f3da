#include <gtest/gtest.h>

#include "rdsm/experiment.hpp"

namespace rdsm {
namespace {

ExperimentConfig noisy_2d() {
  ExperimentConfig c;
  c.algorithm = Algorithm::kRdsm;
  c.objective = "linear-gradient";
  c.x0 = {-0.75, 0.35};
  c.max_iterations = 50;
  c.max_evaluations = 100;
  c.noise = NoiseModel::uniform(0.0, 0.02);
  return c;
}

TEST(ExperimentConfig, DefaultCoefficients) {
  ExperimentConfig c;
  EXPECT_EQ(c.coefficients.reflection, 1.0);
  EXPECT_EQ(c.coefficients.expansion, 2.0);
  EXPECT_EQ(c.coefficients.contraction, 0.5);
  EXPECT_EQ(c.coefficients.shrink, 0.5);
  EXPECT_EQ(c.coefficients.edge_threshold, 0.1);
  EXPECT_EQ(c.coefficients.volume_threshold, 0.1);
  EXPECT_EQ(c.coefficients.initial_simplex, 0.05);
}

TEST(ExperimentConfig, ConfigTextRoundTrips) {
  ExperimentConfig c = noisy_2d();
  c.coefficients.edge_threshold = 1e-5;
  c.coefficients.expansion = 2.5;
  c.seed = 123456789012345ull;
  c.repeat = 7;
  c.scale = 1e-4;
  c.initial_rule = InitialSimplexRule::kRelative;
  c.out_dir = "some dir/with space";
  c.emit_trajectory = true;
  c.x0 = {0.1, -1.0 / 3.0};
  const auto text = c.to_config_text();
  const auto back = parse_config_text(text);
  EXPECT_EQ(back.to_config_text(), text);
  EXPECT_EQ(back.x0, c.x0);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.coefficients.edge_threshold, 1e-5);
  EXPECT_EQ(back.noise->upper, 0.02);
  EXPECT_EQ(back.out_dir, c.out_dir);
}

TEST(ExperimentConfig, ParsesHandWrittenFiles) {
  const auto c = parse_config_text(
      "# settings\n\nalgorithm = dsm\nx0 = [1, 2, 3]\nobjective=rosenbrock\n"
      "noise = none\nmax-iter = 10  # short\n");
  EXPECT_EQ(c.algorithm, Algorithm::kDsm);
  EXPECT_EQ(c.x0, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.objective_spec().dimension, 3);
  EXPECT_FALSE(c.noise);
  EXPECT_EQ(c.max_iterations, 10);
}

TEST(ExperimentConfig, ParseErrors) {
  EXPECT_THROW(parse_config_text("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse_config_text("max-iter = ten\n"), ConfigError);
  EXPECT_THROW(parse_config_text("algorithm = simplex\n"), ConfigError);
  EXPECT_THROW(parse_config_text("noise = cauchy:1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
  EXPECT_THROW(parse_config_text("x0 = 1,,2\n"), ConfigError);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c;
  EXPECT_THROW(c.validate(), ConfigError);  // no x0
  c.x0 = {0.0, 0.0, 0.0};
  EXPECT_THROW(c.validate(), ConfigError);  // linear-gradient is 2D
  c.objective = "rosenbrock";
  EXPECT_NO_THROW(c.validate());
  c.dimension = 5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.dimension = 3;
  c.repeat = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Statistics, MeanAndVariance) {
  double mean = 0, var = 0;
  mean_and_variance({1.0, 2.0, 3.0, 4.0}, mean, var);
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_DOUBLE_EQ(var, 5.0 / 3.0);
  mean_and_variance({7.0}, mean, var);
  EXPECT_DOUBLE_EQ(mean, 7.0);
  EXPECT_EQ(var, 0.0);
}

TEST(Replications, SeedsAreConsecutive) {
  auto c = noisy_2d();
  c.seed = 40;
  c.repeat = 4;
  const auto s = run_replications(c);
  ASSERT_EQ(s.runs.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(s.runs[k].run, k + 1);
    EXPECT_EQ(s.runs[k].seed, 40u + k);
  }
  // Run k of a study equals a single run with that seed.
  auto single = c;
  single.seed = 42;
  single.repeat = 1;
  EXPECT_EQ(run_replications(single).runs[0].endpoint, s.runs[2].endpoint);
}

TEST(Replications, SingleRunHasZeroVariance) {
  auto c = noisy_2d();
  const auto s = run_replications(c);
  EXPECT_EQ(s.cost_variance, 0.0);
  EXPECT_EQ(s.endpoint_variance, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(s.cost_mean, s.runs[0].true_cost);
}

TEST(Replications, TrueCostIsNoiseFree) {
  auto c = noisy_2d();
  c.repeat = 3;
  std::vector<RunRecord> records;
  const auto s = run_replications(c, &records);
  ASSERT_EQ(records.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& x = s.runs[k].endpoint;
    EXPECT_DOUBLE_EQ(s.runs[k].true_cost, linear_gradient(x[0], x[1]));
    EXPECT_EQ(s.runs[k].evaluations, records[k].total_evaluations);
  }
}

TEST(Replications, CsvLayout) {
  auto c = noisy_2d();
  c.repeat = 2;
  const auto csv = run_replications(c).to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "run,seed,x_1,x_2,J,iters,evals");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Reproduce, FilterSelectsByPrefix) {
  const auto one = reproduce("2d-obstacle");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].name, "2d-obstacle");
  EXPECT_EQ(reproduce("2d").size(), 2u);
  EXPECT_THROW(reproduce("nothing"), ConfigError);
}

TEST(Reproduce, NoiseScenariosCarryTwoSummaries) {
  const auto reports = reproduce("noise");
  ASSERT_EQ(reports.size(), 4u);
  std::size_t summaries = 0;
  for (const auto& r : reports) {
    EXPECT_EQ(r.summaries.size(), 2u);
    for (const auto& [algorithm, s] : r.summaries) EXPECT_EQ(s.runs.size(), 20u);
    summaries += r.summaries.size();
  }
  EXPECT_EQ(summaries, 8u);
  const auto table = format_report(reports);
  EXPECT_NE(table.find("checks passed"), std::string::npos);
}

}  // namespace
}  // namespace rdsm
