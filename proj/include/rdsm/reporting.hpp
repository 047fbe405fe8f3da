// Output archives for a finished run: simplex history, points database,
// reevaluation history, learning curve (CSV + SVG) and a 2D trajectory plot.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rdsm/core.hpp"

namespace rdsm {

/// Scientific notation, 10 significant digits, exponent without sign padding
/// or leading zeros: 1000 -> "1.000000000e3", 9.2146e-5 -> "9.214600000e-5".
/// Non-finite values print as "inf", "-inf" and "nan".
std::string format_real(double value);

std::string render_simplex_history(const RunRecord& record);
std::string render_points_database(const RunRecord& record);
std::string render_reevaluation_history(const RunRecord& record);
std::string render_learning_curve_csv(const RunRecord& record);
std::string render_learning_curve_svg(const RunRecord& record);
/// Throws InvalidInput unless the run is two-dimensional.
std::string render_trajectory_svg(const RunRecord& record);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IoError naming the path on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

void write_simplex_history(const RunRecord& record, const std::filesystem::path& path);
void write_points_database(const RunRecord& record, const std::filesystem::path& path);
void write_reevaluation_history(const RunRecord& record, const std::filesystem::path& path);
/// `csv_path` gets the CSV, the same path with extension .svg gets the plot.
void write_learning_curve(const RunRecord& record, const std::filesystem::path& csv_path);

struct OutputBundle {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
};

/// Writes every archive into `directory` (created if missing):
/// SimplexHistory.txt/.dat, PointsDatabase.txt/.dat, ReevaluationHistory.txt,
/// LearningCurve.csv/.svg and, for 2D runs when asked, SimplexTrajectory.svg.
OutputBundle write_output_bundle(const RunRecord& record, const std::filesystem::path& directory,
                                 bool emit_trajectory = false);

}  // namespace rdsm
