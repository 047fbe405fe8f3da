// Simplex geometry: perimeter, volume, degeneracy detection and the
// perimeter-preserving volume-maximizing vertex correction.
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "rdsm/core.hpp"

namespace rdsm {

/// Columns e^i = x_{i+1} - x_0 (edges from the anchor vertex, which is the
/// first vertex passed in).
Eigen::MatrixXd edge_matrix(std::span<const Point> vertices);

/// Sum of all n(n+1)/2 pairwise Euclidean distances.
double perimeter(std::span<const Point> vertices);

/// |det [x_0 ... x_n; 1 ... 1]| / n!
double volume(std::span<const Point> vertices);

struct DegeneracyReport {
  double epsilon_e = 0.0;
  double epsilon_v = 0.0;
  Degeneracy classification = Degeneracy::kNone;

  bool degenerate() const { return classification != Degeneracy::kNone; }
  bool edge_degenerate() const {
    return classification == Degeneracy::kEdge || classification == Degeneracy::kBoth;
  }
  bool volume_degenerate() const {
    return classification == Degeneracy::kVolume || classification == Degeneracy::kBoth;
  }
};

/// epsilon_e: shortest over longest pairwise edge.
/// epsilon_v: (|det e| / prod ||e^i||)^(1/n) with e anchored at vertices[0].
/// A simplex is edge (volume) degenerate when epsilon_e < theta_e
/// (epsilon_v < theta_v).
DegeneracyReport detect_degeneracy(std::span<const Point> vertices, double theta_e,
                                   double theta_v);

struct VertexSolveResult {
  Point point;
  bool converged = false;
  bool used_fallback = false;
  int newton_iterations = 0;
};

/// Maximizes the simplex volume over the position of vertices[moving] while
/// holding the perimeter at `target_perimeter`; the other vertices stay put.
/// Of the two mirror-image maximizers the one on the moving vertex's side of
/// the fixed facet (the closer one) is returned. `converged` is false when
/// the fixed vertices are affinely dependent or no feasible maximizer was
/// found.
VertexSolveResult maximize_volume_at_fixed_perimeter(std::span<const Point> vertices,
                                                     std::size_t moving,
                                                     double target_perimeter);

struct CorrectionResult {
  std::vector<Point> vertices;
  // Indices (into the input) of the vertices that were moved, in the order
  // they were optimized.
  std::vector<std::size_t> moved;
  DegeneracyReport before;
  DegeneracyReport after;
  // Every attempted vertex failed to solve.
  bool failed = false;
};

/// If the simplex is degenerate, replaces its worst vertex by the
/// perimeter-preserving volume maximizer, then the next worst, and so on until
/// the simplex is no longer degenerate or every vertex but the best has been
/// optimized. `costs` picks the best vertex (the detection anchor, never
/// moved) and the worst-first processing order; vertices keep their slots.
CorrectionResult correct_degeneracy(std::span<const Point> vertices,
                                    std::span<const double> costs, double theta_e,
                                    double theta_v);

}  // namespace rdsm
