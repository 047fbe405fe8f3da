// rdsm: run single optimizations, seeded replication studies, or the
// reference scenario suite.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rdsm/experiment.hpp"
#include "rdsm/optimizer.hpp"
#include "rdsm/reporting.hpp"

namespace fs = std::filesystem;

namespace {

std::string point_text(const rdsm::Point& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += rdsm::format_real(x[i]);
  }
  return out + ")";
}

int run_experiment(const rdsm::ExperimentConfig& config) {
  config.validate();
  std::vector<rdsm::RunRecord> records;
  const auto summary = rdsm::run_replications(config, &records);
  const fs::path out_dir(config.out_dir);

  if (config.repeat == 1) {
    const auto& rec = records.front();
    const auto& run = summary.runs.front();
    rdsm::write_output_bundle(rec, out_dir, config.emit_trajectory);
    std::cout << "algorithm   " << rdsm::to_string(config.algorithm) << '\n'
              << "endpoint    " << point_text(rec.best.coords) << '\n'
              << "J           " << rdsm::format_real(rec.best.cost) << '\n';
    if (config.noise) std::cout << "J (true)    " << rdsm::format_real(run.true_cost) << '\n';
    std::cout << "iterations  " << rec.iterations << '\n'
              << "evaluations " << rec.total_evaluations << '\n'
              << "stop        " << rdsm::to_string(rec.stop_reason) << '\n'
              << "corrections " << rec.degeneracies.size() << '\n'
              << "reevaluated " << rec.reevaluations.size() << '\n';
    return 0;
  }

  for (std::size_t k = 0; k < records.size(); ++k) {
    rdsm::write_output_bundle(records[k], out_dir / ("run_" + std::to_string(k + 1)),
                              config.emit_trajectory);
  }
  rdsm::write_file_atomic(out_dir / "summary.csv", summary.to_csv());
  std::cout << "algorithm " << rdsm::to_string(config.algorithm) << ", " << config.repeat
            << " runs, seeds " << config.seed << ".."
            << config.seed + static_cast<std::uint64_t>(config.repeat - 1) << '\n';
  for (Eigen::Index i = 0; i < summary.endpoint_mean.size(); ++i) {
    std::cout << "x_" << i + 1 << "  " << rdsm::format_real(summary.endpoint_mean[i]) << " +- "
              << rdsm::format_real(summary.endpoint_variance[i]) << '\n';
  }
  std::cout << "J    " << rdsm::format_real(summary.cost_mean) << " +- "
            << rdsm::format_real(summary.cost_variance) << "  (mean +- variance; std "
            << rdsm::format_real(summary.cost_stddev()) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downhill simplex optimizer with degeneracy correction and reevaluation"};
  app.set_config("--config", "", "Read settings from a key = value file");

  rdsm::ExperimentConfig config;
  std::string algorithm = "rdsm";
  std::string x0;
  std::string noise = "none";
  std::string init_rule = "auto";
  bool dump_config = false;

  app.add_option("--algorithm", algorithm, "dsm or rdsm")
      ->check(CLI::IsMember({"dsm", "rdsm"}))
      ->capture_default_str();
  app.add_option("--objective", config.objective, "linear-gradient, linear-gradient-obstacle, rosenbrock")
      ->capture_default_str();
  app.add_option("--dim", config.dimension, "Problem dimension (0: from x0)")->capture_default_str();
  app.add_option("--x0", x0, "Starting point, comma separated");
  app.add_option("--max-iter", config.max_iterations, "Iteration limit")->capture_default_str();
  app.add_option("--max-eval", config.max_evaluations, "Objective evaluation limit")
      ->capture_default_str();
  app.add_option("--alpha", config.coefficients.reflection, "Reflection")->capture_default_str();
  app.add_option("--gamma", config.coefficients.expansion, "Expansion")->capture_default_str();
  app.add_option("--rho", config.coefficients.contraction, "Contraction")->capture_default_str();
  app.add_option("--sigma", config.coefficients.shrink, "Shrink")->capture_default_str();
  app.add_option("--theta-e", config.coefficients.edge_threshold, "Edge degeneracy threshold")
      ->capture_default_str();
  app.add_option("--theta-v", config.coefficients.volume_threshold, "Volume degeneracy threshold")
      ->capture_default_str();
  app.add_option("--init-coeff", config.coefficients.initial_simplex, "Initial simplex step")
      ->capture_default_str();
  app.add_option("--init-rule", init_rule, "Initial simplex placement: auto, relative, domain")
      ->check(CLI::IsMember({"auto", "relative", "domain"}))
      ->capture_default_str();
  app.add_option("--noise", noise, "none, uniform:a,b or gaussian:variance")->capture_default_str();
  app.add_option("--seed", config.seed, "Noise seed (replications use seed, seed+1, ...)")
      ->capture_default_str();
  app.add_option("--repeat", config.repeat, "Number of seeded runs")->capture_default_str();
  app.add_option("--scale", config.scale, "Cost multiplier used by the stopping tests")
      ->capture_default_str();
  app.add_option("--out-dir", config.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--emit-trajectory", config.emit_trajectory, "Write SimplexTrajectory.svg (2D)");
  app.add_flag("--dump-config", dump_config, "Print the resolved settings as a config file and exit")
      ->configurable(false);

  auto* reproduce = app.add_subcommand("reproduce", "Run the reference scenario suite");
  std::string only;
  reproduce->add_option("--only", only, "Run scenarios whose name starts with this");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*reproduce) {
      std::cout << rdsm::format_report(rdsm::reproduce(only));
      return 0;
    }
    config.algorithm = rdsm::parse_algorithm(algorithm);
    config.initial_rule = rdsm::parse_initial_simplex_rule(init_rule);
    if (noise != "none") config.noise = rdsm::NoiseModel::parse(noise);
    if (x0.empty()) {
      std::cerr << "--x0 is required\nRun with --help for more information.\n";
      return 2;
    }
    config.x0 = rdsm::parse_real_list(x0);
    if (dump_config) {
      std::cout << config.to_config_text();
      return 0;
    }
    return run_experiment(config);
  } catch (const rdsm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 3;
  } catch (const rdsm::InvalidInput& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 3;
  } catch (const rdsm::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  }
}
