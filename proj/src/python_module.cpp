#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rdsm/experiment.hpp"
#include "rdsm/geometry.hpp"
#include "rdsm/optimizer.hpp"
#include "rdsm/reporting.hpp"

namespace py = pybind11;
using namespace rdsm;

namespace {

ExperimentConfig make_config(const std::string& algorithm, const std::string& objective,
                             const std::vector<double>& x0, int dim, int max_iter,
                             std::int64_t max_eval, const std::optional<std::string>& noise,
                             std::uint64_t seed, int repeat, double scale,
                             const std::string& init_rule, const py::dict& coefficients) {
  ExperimentConfig c;
  c.algorithm = parse_algorithm(algorithm);
  c.objective = objective;
  c.x0 = x0;
  c.dimension = dim;
  c.max_iterations = max_iter;
  c.max_evaluations = max_eval;
  if (noise && *noise != "none") c.noise = NoiseModel::parse(*noise);
  c.seed = seed;
  c.repeat = repeat;
  c.scale = scale;
  c.initial_rule = parse_initial_simplex_rule(init_rule);
  for (const auto& [key, value] : coefficients) {
    const auto name = key.cast<std::string>();
    const auto v = value.cast<double>();
    if (name == "alpha") c.coefficients.reflection = v;
    else if (name == "gamma") c.coefficients.expansion = v;
    else if (name == "rho") c.coefficients.contraction = v;
    else if (name == "sigma") c.coefficients.shrink = v;
    else if (name == "theta_e") c.coefficients.edge_threshold = v;
    else if (name == "theta_v") c.coefficients.volume_threshold = v;
    else if (name == "init_coeff") c.coefficients.initial_simplex = v;
    else throw ConfigError("unknown coefficient '" + name + "'");
  }
  c.validate();
  return c;
}

std::vector<std::string> operation_labels(const RunRecord& r) {
  std::vector<std::string> out;
  for (const auto& row : r.rows) out.emplace_back(to_string(row.operation));
  return out;
}

}  // namespace

PYBIND11_MODULE(_rdsm, m) {
  m.doc() = "Downhill simplex optimizer with degeneracy correction and reevaluation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("volume", [](const std::vector<Point>& v) { return volume(v); }, py::arg("vertices"));
  m.def("perimeter", [](const std::vector<Point>& v) { return perimeter(v); },
        py::arg("vertices"));

  py::class_<DegeneracyReport>(m, "DegeneracyReport")
      .def_readonly("epsilon_e", &DegeneracyReport::epsilon_e)
      .def_readonly("epsilon_v", &DegeneracyReport::epsilon_v)
      .def_property_readonly("classification",
                             [](const DegeneracyReport& r) {
                               return std::string(to_string(r.classification));
                             })
      .def_property_readonly("edge_degenerate", &DegeneracyReport::edge_degenerate)
      .def_property_readonly("volume_degenerate", &DegeneracyReport::volume_degenerate);

  m.def("detect_degeneracy",
        [](const std::vector<Point>& v, double theta_e, double theta_v) {
          return detect_degeneracy(v, theta_e, theta_v);
        },
        py::arg("vertices"), py::arg("theta_e") = 0.1, py::arg("theta_v") = 0.1);

  py::class_<CorrectionResult>(m, "CorrectionResult")
      .def_readonly("vertices", &CorrectionResult::vertices)
      .def_readonly("moved", &CorrectionResult::moved)
      .def_readonly("before", &CorrectionResult::before)
      .def_readonly("after", &CorrectionResult::after)
      .def_readonly("failed", &CorrectionResult::failed);

  m.def("correct_degeneracy",
        [](const std::vector<Point>& v, const std::vector<double>& costs, double theta_e,
           double theta_v) { return correct_degeneracy(v, costs, theta_e, theta_v); },
        py::arg("vertices"), py::arg("costs"), py::arg("theta_e") = 0.1,
        py::arg("theta_v") = 0.1);

  m.def("linear_gradient", &linear_gradient, py::arg("x1"), py::arg("x2"));
  m.def("rosenbrock", &rosenbrock, py::arg("x"));
  m.def("format_real", &format_real, py::arg("value"));

  py::class_<RunRecord>(m, "RunRecord")
      .def_property_readonly("algorithm",
                             [](const RunRecord& r) { return std::string(to_string(r.algorithm)); })
      .def_readonly("iterations", &RunRecord::iterations)
      .def_readonly("total_evaluations", &RunRecord::total_evaluations)
      .def_property_readonly("best_point", [](const RunRecord& r) { return r.best.coords; })
      .def_property_readonly("best_cost", [](const RunRecord& r) { return r.best.cost; })
      .def_property_readonly("stop_reason",
                             [](const RunRecord& r) { return std::string(to_string(r.stop_reason)); })
      .def_property_readonly("operations", &operation_labels)
      .def_property_readonly("corrections",
                             [](const RunRecord& r) { return r.degeneracies.size(); })
      .def_property_readonly("reevaluations",
                             [](const RunRecord& r) { return r.reevaluations.size(); })
      .def("simplex_history", &render_simplex_history)
      .def("points_database", &render_points_database)
      .def("reevaluation_history", &render_reevaluation_history)
      .def("learning_curve", &render_learning_curve_csv)
      .def("write", [](const RunRecord& r, const std::filesystem::path& dir, bool trajectory) {
             return write_output_bundle(r, dir, trajectory).files;
           },
           py::arg("directory"), py::arg("emit_trajectory") = false);

  m.def("run",
        [](const std::string& algorithm, const std::string& objective,
           const std::vector<double>& x0, int dim, int max_iter, std::int64_t max_eval,
           const std::optional<std::string>& noise, std::uint64_t seed, double scale,
           const std::string& init_rule, const py::dict& coefficients) {
          const auto c = make_config(algorithm, objective, x0, dim, max_iter, max_eval, noise,
                                     seed, 1, scale, init_rule, coefficients);
          return rdsm::run(c.algorithm, c.optimizer_config(), c.objective_spec(), c.seed);
        },
        py::arg("algorithm"), py::arg("objective"), py::arg("x0"), py::arg("dim") = 0,
        py::arg("max_iter") = 200, py::arg("max_eval") = 400, py::arg("noise") = py::none(),
        py::arg("seed") = 1, py::arg("scale") = 1.0, py::arg("init_rule") = "auto",
        py::arg("coefficients") = py::dict());

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("run", &RunSummary::run)
      .def_readonly("seed", &RunSummary::seed)
      .def_readonly("endpoint", &RunSummary::endpoint)
      .def_readonly("true_cost", &RunSummary::true_cost)
      .def_readonly("iterations", &RunSummary::iterations)
      .def_readonly("evaluations", &RunSummary::evaluations);

  py::class_<ReplicationSummary>(m, "ReplicationSummary")
      .def_readonly("runs", &ReplicationSummary::runs)
      .def_readonly("endpoint_mean", &ReplicationSummary::endpoint_mean)
      .def_readonly("endpoint_variance", &ReplicationSummary::endpoint_variance)
      .def_readonly("cost_mean", &ReplicationSummary::cost_mean)
      .def_readonly("cost_variance", &ReplicationSummary::cost_variance)
      .def_property_readonly("cost_stddev", &ReplicationSummary::cost_stddev)
      .def("to_csv", &ReplicationSummary::to_csv);

  m.def("run_replications",
        [](const std::string& algorithm, const std::string& objective,
           const std::vector<double>& x0, int repeat, int dim, int max_iter,
           std::int64_t max_eval, const std::optional<std::string>& noise, std::uint64_t seed,
           double scale, const std::string& init_rule, const py::dict& coefficients) {
          const auto c = make_config(algorithm, objective, x0, dim, max_iter, max_eval, noise,
                                     seed, repeat, scale, init_rule, coefficients);
          py::gil_scoped_release release;
          return run_replications(c);
        },
        py::arg("algorithm"), py::arg("objective"), py::arg("x0"), py::arg("repeat"),
        py::arg("dim") = 0, py::arg("max_iter") = 200, py::arg("max_eval") = 400,
        py::arg("noise") = py::none(), py::arg("seed") = 1, py::arg("scale") = 1.0,
        py::arg("init_rule") = "auto", py::arg("coefficients") = py::dict());

  py::class_<ScenarioCheck>(m, "ScenarioCheck")
      .def_readonly("label", &ScenarioCheck::label)
      .def_readonly("measured", &ScenarioCheck::measured)
      .def_readonly("passed", &ScenarioCheck::passed);

  py::class_<ScenarioReport>(m, "ScenarioReport")
      .def_readonly("name", &ScenarioReport::name)
      .def_readonly("checks", &ScenarioReport::checks)
      .def_property_readonly("passed", &ScenarioReport::passed);

  m.def("scenario_names", &scenario_names);
  m.def("reproduce",
        [](const std::string& only) {
          py::gil_scoped_release release;
          return reproduce(only);
        },
        py::arg("only") = "");
  m.def("format_report", &format_report, py::arg("reports"));
}
