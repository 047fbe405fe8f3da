#include "rdsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

namespace rdsm {

namespace {

constexpr double kNewtonTolerance = 1e-10;
constexpr int kNewtonMaxIterations = 100;
constexpr double kPerimeterTolerance = 1e-8;
constexpr double kRankThreshold = 1e-10;
constexpr int kFallbackMaxIterations = 20000;

void check_simplex(std::span<const Point> vertices) {
  if (vertices.size() < 2) {
    throw InvalidInput("a simplex needs at least 2 vertices, got " +
                       std::to_string(vertices.size()));
  }
  const auto n = static_cast<Eigen::Index>(vertices.size() - 1);
  for (const auto& v : vertices) {
    if (v.size() != n) {
      throw InvalidInput("simplex with " + std::to_string(vertices.size()) +
                         " vertices needs points of dimension " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
    }
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<std::size_t> order_by_cost(std::span<const double> costs) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    // NaN sorts last.
    if (std::isnan(costs[a])) return false;
    if (std::isnan(costs[b])) return true;
    return costs[a] < costs[b];
  });
  return order;
}

std::vector<Point> permuted(std::span<const Point> vertices,
                            const std::vector<std::size_t>& order) {
  std::vector<Point> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(vertices[i]);
  return out;
}

// The facet spanned by the fixed vertices: its centroid, an orthonormal
// basis of its direction space and the unit normal.
struct Facet {
  Point centroid;
  Eigen::MatrixXd basis;  // n x (n-1)
  Point normal;
  double fixed_perimeter = 0.0;
  std::vector<Point> fixed;
};

bool build_facet(std::span<const Point> vertices, std::size_t moving, Facet& facet) {
  const auto n = static_cast<Eigen::Index>(vertices.size() - 1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i != moving) facet.fixed.push_back(vertices[i]);
  }
  facet.centroid = Point::Zero(n);
  for (const auto& f : facet.fixed) facet.centroid += f;
  facet.centroid /= static_cast<double>(n);
  facet.fixed_perimeter = 0.0;
  for (std::size_t i = 0; i < facet.fixed.size(); ++i) {
    for (std::size_t j = i + 1; j < facet.fixed.size(); ++j) {
      facet.fixed_perimeter += (facet.fixed[i] - facet.fixed[j]).norm();
    }
  }

  if (n == 1) {
    facet.basis = Eigen::MatrixXd(1, 0);
    facet.normal = Point::Ones(1);
  } else {
    Eigen::MatrixXd edges(n, n - 1);
    for (Eigen::Index j = 1; j < n; ++j) {
      edges.col(j - 1) = facet.fixed[j] - facet.fixed[0];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(edges);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < n - 1) return false;
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    facet.basis = q.leftCols(n - 1);
    facet.normal = q.col(n - 1);
  }

  const double side = facet.normal.dot(vertices[moving] - facet.centroid);
  if (side < 0.0) facet.normal = -facet.normal;
  return true;
}

// Residual of the stationarity system of V(y) - lambda (P(y) - P0), with the
// constant volume gradient replaced by the unit facet normal and the
// constraint divided by its target so both blocks are dimensionless.
Eigen::VectorXd kkt_residual(const Facet& facet, double target_sum, const Point& y,
                             double lambda) {
  const auto n = y.size();
  Eigen::VectorXd r(n + 1);
  Point pull = Point::Zero(n);
  double sum = 0.0;
  for (const auto& f : facet.fixed) {
    const Point d = y - f;
    const double len = d.norm();
    sum += len;
    if (len > 0.0) pull += d / len;
  }
  r.head(n) = facet.normal - lambda * pull;
  r[n] = (sum - target_sum) / target_sum;
  return r;
}

Eigen::MatrixXd kkt_jacobian(const Facet& facet, double target_sum, const Point& y,
                             double lambda) {
  const auto n = y.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::MatrixXd curvature = Eigen::MatrixXd::Zero(n, n);
  Point pull = Point::Zero(n);
  for (const auto& f : facet.fixed) {
    const Point d = y - f;
    const double len = d.norm();
    if (len <= 0.0) continue;
    const Point unit = d / len;
    pull += unit;
    curvature += (Eigen::MatrixXd::Identity(n, n) - unit * unit.transpose()) / len;
  }
  jac.topLeftCorner(n, n) = -lambda * curvature;
  jac.topRightCorner(n, 1) = -pull;
  jac.bottomLeftCorner(1, n) = pull.transpose() / target_sum;
  return jac;
}

double initial_multiplier(const Facet& facet, const Point& y) {
  Point pull = Point::Zero(y.size());
  for (const auto& f : facet.fixed) {
    const Point d = y - f;
    const double len = d.norm();
    if (len > 0.0) pull += d / len;
  }
  const double denom = pull.squaredNorm();
  return denom > 0.0 ? facet.normal.dot(pull) / denom : 1.0;
}

struct NewtonOutcome {
  Point y;
  bool converged = false;
  int iterations = 0;
};

NewtonOutcome newton_solve(const Facet& facet, double target_sum, Point y, double lambda) {
  NewtonOutcome out;
  Eigen::VectorXd r = kkt_residual(facet, target_sum, y, lambda);
  double norm = r.lpNorm<Eigen::Infinity>();
  const auto n = y.size();
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    out.iterations = it;
    if (norm < kNewtonTolerance) break;
    const Eigen::MatrixXd jac = kkt_jacobian(facet, target_sum, y, lambda);
    const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    double t = 1.0;
    Point y_next;
    double lambda_next = lambda;
    double norm_next = norm;
    // Halve the step while the residual grows.
    for (int halvings = 0; halvings < 40; ++halvings) {
      y_next = y + t * step.head(n);
      lambda_next = lambda + t * step[n];
      r = kkt_residual(facet, target_sum, y_next, lambda_next);
      norm_next = r.lpNorm<Eigen::Infinity>();
      if (std::isfinite(norm_next) && norm_next <= norm) break;
      t *= 0.5;
    }
    if (!(norm_next <= norm)) break;
    y = y_next;
    lambda = lambda_next;
    norm = norm_next;
    out.iterations = it + 1;
  }
  out.y = y;
  out.converged = norm < kNewtonTolerance && lambda > 0.0 &&
                  facet.normal.dot(y - facet.centroid) >= 0.0;
  return out;
}

// Height above the facet at in-facet offset `s` such that the distances to the
// fixed vertices sum to target_sum. Returns a negative value when even height
// zero overshoots the target.
double height_for_offset(const std::vector<double>& planar_sq, double target_sum) {
  auto total = [&](double h) {
    double sum = 0.0;
    for (double d2 : planar_sq) sum += std::sqrt(d2 + h * h);
    return sum;
  };
  if (total(0.0) > target_sum) return -1.0;
  double lo = 0.0;
  double hi = target_sum;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (total(mid) > target_sum ? hi : lo) = mid;
  }
  return lo;
}

std::vector<Eigen::VectorXd> facet_anchors(const Facet& facet) {
  std::vector<Eigen::VectorXd> anchors;
  anchors.reserve(facet.fixed.size());
  for (const auto& f : facet.fixed) {
    anchors.push_back(facet.basis.transpose() * (f - facet.centroid));
  }
  return anchors;
}

double height_at(const std::vector<Eigen::VectorXd>& anchors, const Eigen::VectorXd& s,
                 double target_sum) {
  std::vector<double> planar_sq;
  planar_sq.reserve(anchors.size());
  for (const auto& a : anchors) planar_sq.push_back((s - a).squaredNorm());
  return height_for_offset(planar_sq, target_sum);
}

// In-facet offset to start from. The facet centroid is preferred: the set of
// feasible (offset, height) pairs is convex, and on the facet itself the
// distance sum can be flat, which stalls any search started there.
Eigen::VectorXd start_offset(const Facet& facet, double target_sum, const Point& vertex) {
  const auto anchors = facet_anchors(facet);
  const Eigen::VectorXd centre = Eigen::VectorXd::Zero(facet.basis.cols());
  if (height_at(anchors, centre, target_sum) > 0.0) return centre;
  return facet.basis.transpose() * (vertex - facet.centroid);
}

// Alternates the two optimality conditions: the height that restores the
// perimeter for the current in-facet position, then a Weiszfeld step towards
// the minimizer of the distance sum at that height. Each round can only raise
// the height, so the iteration climbs monotonically to the maximizer.
std::optional<Point> alternating_solve(const Facet& facet, double target_sum,
                                       const Point& start) {
  const auto m = facet.basis.cols();
  const auto anchors = facet_anchors(facet);
  Eigen::VectorXd s = start_offset(facet, target_sum, start);
  double h = 0.0;
  std::vector<double> planar_sq(anchors.size());
  for (int it = 0; it < kFallbackMaxIterations; ++it) {
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      planar_sq[j] = (s - anchors[j]).squaredNorm();
    }
    const double next_h = height_for_offset(planar_sq, target_sum);
    if (next_h < 0.0) return std::nullopt;
    h = next_h;
    if (m == 0) break;
    Eigen::VectorXd weighted = Eigen::VectorXd::Zero(m);
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      const double len = std::sqrt(planar_sq[j] + h * h);
      if (len <= 0.0) continue;
      weighted += anchors[j] / len;
      weight_sum += 1.0 / len;
    }
    if (weight_sum <= 0.0) break;
    const Eigen::VectorXd next_s = weighted / weight_sum;
    const double move = (next_s - s).norm();
    s = next_s;
    if (move <= 1e-15 * target_sum) break;
  }
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    planar_sq[j] = (s - anchors[j]).squaredNorm();
  }
  h = std::max(0.0, height_for_offset(planar_sq, target_sum));
  return Point(facet.centroid + facet.basis * s + h * facet.normal);
}

bool perimeter_feasible(std::span<const Point> vertices, std::size_t moving, const Point& y,
                        double target_perimeter) {
  std::vector<Point> trial(vertices.begin(), vertices.end());
  trial[moving] = y;
  const double p = perimeter(trial);
  return std::abs(p - target_perimeter) <= kPerimeterTolerance * target_perimeter;
}

}  // namespace

Eigen::MatrixXd edge_matrix(std::span<const Point> vertices) {
  check_simplex(vertices);
  const auto n = static_cast<Eigen::Index>(vertices.size() - 1);
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i) e.col(i) = vertices[i + 1] - vertices[0];
  return e;
}

double perimeter(std::span<const Point> vertices) {
  check_simplex(vertices);
  double sum = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      sum += (vertices[i] - vertices[j]).norm();
    }
  }
  return sum;
}

double volume(std::span<const Point> vertices) {
  // Subtracting the first column of the homogeneous matrix from the others
  // leaves the determinant unchanged and reduces it to det of the edge matrix.
  const Eigen::MatrixXd e = edge_matrix(vertices);
  const auto n = static_cast<int>(e.cols());
  return std::abs(e.partialPivLu().determinant()) / factorial(n);
}

DegeneracyReport detect_degeneracy(std::span<const Point> vertices, double theta_e,
                                   double theta_v) {
  check_simplex(vertices);
  DegeneracyReport report;
  double shortest = std::numeric_limits<double>::infinity();
  double longest = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      const double len = (vertices[i] - vertices[j]).norm();
      shortest = std::min(shortest, len);
      longest = std::max(longest, len);
    }
  }

  if (longest <= 0.0) {
    report.classification = Degeneracy::kBoth;
    return report;
  }
  report.epsilon_e = shortest / longest;

  const Eigen::MatrixXd e = edge_matrix(vertices);
  const double norms = e.colwise().norm().prod();
  if (norms > 0.0) {
    const double ratio = std::abs(e.partialPivLu().determinant()) / norms;
    report.epsilon_v = std::pow(ratio, 1.0 / static_cast<double>(e.cols()));
  }

  const bool edge = report.epsilon_e < theta_e;
  const bool vol = report.epsilon_v < theta_v;
  report.classification = edge && vol ? Degeneracy::kBoth
                          : edge      ? Degeneracy::kEdge
                          : vol       ? Degeneracy::kVolume
                                      : Degeneracy::kNone;
  return report;
}

VertexSolveResult maximize_volume_at_fixed_perimeter(std::span<const Point> vertices,
                                                     std::size_t moving,
                                                     double target_perimeter) {
  check_simplex(vertices);
  if (moving >= vertices.size()) throw InvalidInput("moving vertex index out of range");

  VertexSolveResult result;
  result.point = vertices[moving];

  Facet facet;
  if (!build_facet(vertices, moving, facet)) return result;
  const double target_sum = target_perimeter - facet.fixed_perimeter;
  if (!(target_sum > 0.0)) return result;

  double longest = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      longest = std::max(longest, (vertices[i] - vertices[j]).norm());
    }
  }

  const Eigen::VectorXd offset = start_offset(facet, target_sum, vertices[moving]);
  const double lift = std::max(height_at(facet_anchors(facet), offset, target_sum),
                               1e-3 * longest);
  const Point start = facet.centroid + facet.basis * offset + lift * facet.normal;
  NewtonOutcome newton =
      newton_solve(facet, target_sum, start, initial_multiplier(facet, start));
  result.newton_iterations = newton.iterations;
  if (newton.converged &&
      perimeter_feasible(vertices, moving, newton.y, target_perimeter)) {
    result.point = newton.y;
    result.converged = true;
    return result;
  }

  const auto fallback = alternating_solve(facet, target_sum, vertices[moving]);
  if (!fallback) return result;
  result.used_fallback = true;
  // Polish; the fallback only converges linearly.
  newton = newton_solve(facet, target_sum, *fallback, initial_multiplier(facet, *fallback));
  result.newton_iterations += newton.iterations;
  if (newton.converged &&
      perimeter_feasible(vertices, moving, newton.y, target_perimeter)) {
    result.point = newton.y;
    result.converged = true;
  } else if (perimeter_feasible(vertices, moving, *fallback, target_perimeter)) {
    result.point = *fallback;
    result.converged = true;
  }
  return result;
}

CorrectionResult correct_degeneracy(std::span<const Point> vertices,
                                    std::span<const double> costs, double theta_e,
                                    double theta_v) {
  check_simplex(vertices);
  if (costs.size() != vertices.size()) {
    throw InvalidInput("correct_degeneracy needs one cost per vertex");
  }

  CorrectionResult result;
  result.vertices.assign(vertices.begin(), vertices.end());
  const auto order = order_by_cost(costs);
  result.before = detect_degeneracy(permuted(result.vertices, order), theta_e, theta_v);
  result.after = result.before;
  if (!result.before.degenerate()) return result;

  const double target = perimeter(vertices);
  // Worst first; the best vertex anchors the simplex and is never moved.
  for (auto it = order.rbegin(); it + 1 != order.rend(); ++it) {
    const auto solved = maximize_volume_at_fixed_perimeter(result.vertices, *it, target);
    if (!solved.converged) continue;
    result.vertices[*it] = solved.point;
    result.moved.push_back(*it);
    result.after = detect_degeneracy(permuted(result.vertices, order), theta_e, theta_v);
    if (!result.after.degenerate()) break;
  }
  result.failed = result.moved.empty();
  return result;
}

}  // namespace rdsm
