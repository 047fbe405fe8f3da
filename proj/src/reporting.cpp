#include "rdsm/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

namespace rdsm {

namespace {

namespace fs = std::filesystem;

constexpr double kSvgWidth = 640.0;
constexpr double kSvgHeight = 400.0;
constexpr double kMargin = 50.0;

template <typename T>
std::string join(const std::vector<T>& values, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << sep;
    out << values[i];
  }
  return out.str();
}

std::string coordinate_header(int dimension) {
  std::string out;
  for (int i = 1; i <= dimension; ++i) out += "x_" + std::to_string(i) + '\t';
  return out;
}

std::string coordinates(const Point& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out += format_real(x[i]) + '\t';
  return out;
}

std::string pixel(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double from = 0.0;
  double to = 1.0;

  double map(double v) const {
    const double span = hi - lo;
    const double t = span > 0.0 ? (v - lo) / span : 0.5;
    return from + t * (to - from);
  }
};

Axis padded_axis(double lo, double hi, double from, double to) {
  if (!(hi > lo)) {
    const double pad = lo != 0.0 ? std::abs(lo) * 0.1 : 1.0;
    return Axis{lo - pad, hi + pad, from, to};
  }
  const double pad = (hi - lo) * 0.05;
  return Axis{lo - pad, hi + pad, from, to};
}

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + pixel(kSvgWidth) +
         "\" height=\"" + pixel(kSvgHeight) + "\" viewBox=\"0 0 " + pixel(kSvgWidth) + ' ' +
         pixel(kSvgHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string svg_frame(const std::string& x_label, const std::string& y_label, const Axis& x,
                      const Axis& y) {
  std::string out;
  out += "<rect x=\"" + pixel(kMargin) + "\" y=\"" + pixel(kMargin) + "\" width=\"" +
         pixel(kSvgWidth - 2 * kMargin) + "\" height=\"" + pixel(kSvgHeight - 2 * kMargin) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + pixel(kSvgWidth / 2) + "\" y=\"" + pixel(kSvgHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + "</text>\n";
  out += "<text x=\"14\" y=\"" + pixel(kSvgHeight / 2) + "\" text-anchor=\"middle\" " +
         "font-size=\"12\" transform=\"rotate(-90 14 " + pixel(kSvgHeight / 2) + ")\">" +
         y_label + "</text>\n";
  const auto tick = [&](double px, double py, const std::string& text, const char* anchor) {
    out += "<text x=\"" + pixel(px) + "\" y=\"" + pixel(py) + "\" text-anchor=\"" + anchor +
           "\" font-size=\"10\">" + text + "</text>\n";
  };
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x.lo);
  tick(x.from, kSvgHeight - kMargin + 14, buf, "start");
  std::snprintf(buf, sizeof buf, "%.4g", x.hi);
  tick(x.to, kSvgHeight - kMargin + 14, buf, "end");
  std::snprintf(buf, sizeof buf, "%.4g", y.lo);
  tick(kMargin - 4, y.from, buf, "end");
  std::snprintf(buf, sizeof buf, "%.4g", y.hi);
  tick(kMargin - 4, y.to + 10, buf, "end");
  return out;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", value);
  std::string text(buf);
  const auto e = text.find('e');
  std::string mantissa = text.substr(0, e);
  std::string exponent = text.substr(e + 1);
  bool negative = false;
  std::size_t pos = 0;
  if (exponent[pos] == '+' || exponent[pos] == '-') negative = exponent[pos++] == '-';
  while (pos + 1 < exponent.size() && exponent[pos] == '0') ++pos;
  return mantissa + 'e' + (negative ? "-" : "") + exponent.substr(pos);
}

std::string render_simplex_history(const RunRecord& record) {
  std::ostringstream out;
  out << "iter\tsimplex_id\tvertex_ids\toperation\tcounters\n";
  for (const auto& row : record.rows) {
    out << row.iteration << '\t' << row.simplex_id << '\t' << join(row.before, ';')
        << "→" << join(row.after, ';') << '\t' << to_string(row.operation) << '\t'
        << join(row.counters, ';') << '\n';
  }
  return out.str();
}

std::string render_points_database(const RunRecord& record) {
  std::string out = "point_id\t" + coordinate_header(record.dimension) +
                    "J\tsimplex_id\toperation\n";
  for (const auto& p : record.points) {
    out += std::to_string(p.id) + '\t' + coordinates(p.coords) + format_real(p.value) + '\t' +
           std::to_string(p.simplex_id) + '\t' + std::string(to_string(p.operation)) + '\n';
  }
  return out;
}

std::string render_reevaluation_history(const RunRecord& record) {
  std::string out = "iter\tpoint_id\t" + coordinate_header(record.dimension) +
                    "J_before\tJ_after\n";
  for (const auto& e : record.reevaluations) {
    out += std::to_string(e.iteration) + '\t' + std::to_string(e.point) + '\t' +
           coordinates(e.coords) + format_real(e.cost_before) + '\t' +
           format_real(e.cost_after) + '\n';
  }
  return out;
}

std::string render_learning_curve_csv(const RunRecord& record) {
  std::string out = "evaluation_index,J,best_so_far_J\n";
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : record.evaluations) {
    best = std::min(best, e.value);
    out += std::to_string(e.index) + ',' + format_real(e.value) + ',' + format_real(best) + '\n';
  }
  return out;
}

std::string render_learning_curve_svg(const RunRecord& record) {
  std::vector<double> best_so_far;
  double best = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& e : record.evaluations) {
    best = std::min(best, e.value);
    best_so_far.push_back(best);
    if (std::isfinite(best)) {
      lo = std::min(lo, best);
      hi = std::max(hi, best);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  const double count = static_cast<double>(std::max<std::size_t>(record.evaluations.size(), 1));
  const Axis x = padded_axis(1.0, count, kMargin, kSvgWidth - kMargin);
  const Axis y = padded_axis(lo, hi, kSvgHeight - kMargin, kMargin);

  std::string out = svg_open();
  out += svg_frame("evaluation", "J", x, y);

  // Evaluated points, skipping those off the best-so-far range (penalties, inf).
  out += "<g fill=\"#1f77b4\" fill-opacity=\"0.5\">\n";
  for (const auto& e : record.evaluations) {
    if (!std::isfinite(e.value) || e.value < y.lo || e.value > y.hi) continue;
    out += "<circle cx=\"" + pixel(x.map(static_cast<double>(e.index))) + "\" cy=\"" +
           pixel(y.map(e.value)) + "\" r=\"2\"/>\n";
  }
  out += "</g>\n";

  std::string path;
  bool open = false;
  double last_y = 0.0;
  for (std::size_t i = 0; i < best_so_far.size(); ++i) {
    if (!std::isfinite(best_so_far[i])) continue;
    const double px = x.map(static_cast<double>(record.evaluations[i].index));
    const double py = y.map(best_so_far[i]);
    if (!open) {
      path += 'M' + pixel(px) + ' ' + pixel(py);
      open = true;
    } else {
      path += " H" + pixel(px);
      if (py != last_y) path += " V" + pixel(py);
    }
    last_y = py;
  }
  if (open) {
    out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_trajectory_svg(const RunRecord& record) {
  if (record.dimension != 2) {
    throw InvalidInput("the simplex trajectory plot needs a two-dimensional run");
  }
  std::map<PointId, Point> coords;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& p : record.points) {
    coords[p.id] = p.coords;
    if (!p.coords.allFinite()) continue;
    x_lo = std::min(x_lo, p.coords[0]);
    x_hi = std::max(x_hi, p.coords[0]);
    y_lo = std::min(y_lo, p.coords[1]);
    y_hi = std::max(y_hi, p.coords[1]);
  }
  if (!std::isfinite(x_lo)) x_lo = y_lo = 0.0, x_hi = y_hi = 1.0;
  const Axis x = padded_axis(x_lo, x_hi, kMargin, kSvgWidth - kMargin);
  const Axis y = padded_axis(y_lo, y_hi, kSvgHeight - kMargin, kMargin);

  std::string out = svg_open();
  out += svg_frame("x_1", "x_2", x, y);
  const auto polygon = [&](const std::vector<PointId>& ids, const char* style) {
    std::string pts;
    for (PointId id : ids) {
      const auto it = coords.find(id);
      if (it == coords.end()) return;
      if (!pts.empty()) pts += ' ';
      pts += pixel(x.map(it->second[0])) + ',' + pixel(y.map(it->second[1]));
    }
    out += "<polygon points=\"" + pts + "\" " + style + "/>\n";
  };
  if (!record.rows.empty()) {
    polygon(record.rows.front().before, "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"");
  }
  for (const auto& row : record.rows) {
    if (row.operation == Operation::kReevaluation) continue;
    if (row.operation == Operation::kDegeneracyCorrection) {
      polygon(row.after,
              "fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.2\" stroke-dasharray=\"4 3\"");
    } else {
      polygon(row.after, "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.8\"");
    }
  }
  out += "</svg>\n";
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

void write_simplex_history(const RunRecord& record, const fs::path& path) {
  write_file_atomic(path, render_simplex_history(record));
}

void write_points_database(const RunRecord& record, const fs::path& path) {
  write_file_atomic(path, render_points_database(record));
}

void write_reevaluation_history(const RunRecord& record, const fs::path& path) {
  write_file_atomic(path, render_reevaluation_history(record));
}

void write_learning_curve(const RunRecord& record, const fs::path& csv_path) {
  write_file_atomic(csv_path, render_learning_curve_csv(record));
  fs::path svg = csv_path;
  svg.replace_extension(".svg");
  write_file_atomic(svg, render_learning_curve_svg(record));
}

OutputBundle write_output_bundle(const RunRecord& record, const fs::path& directory,
                                 bool emit_trajectory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw IoError("cannot create output directory '" + directory.string() + "'");
  }
  OutputBundle bundle{directory, {}};
  const auto put = [&](const char* name, const std::string& content) {
    const fs::path path = directory / name;
    write_file_atomic(path, content);
    bundle.files.push_back(path);
  };
  const std::string history = render_simplex_history(record);
  const std::string points = render_points_database(record);
  put("SimplexHistory.txt", history);
  put("SimplexHistory.dat", history);
  put("PointsDatabase.txt", points);
  put("PointsDatabase.dat", points);
  put("ReevaluationHistory.txt", render_reevaluation_history(record));
  put("LearningCurve.csv", render_learning_curve_csv(record));
  put("LearningCurve.svg", render_learning_curve_svg(record));
  if (emit_trajectory && record.dimension == 2) {
    put("SimplexTrajectory.svg", render_trajectory_svg(record));
  }
  return bundle;
}

}  // namespace rdsm
