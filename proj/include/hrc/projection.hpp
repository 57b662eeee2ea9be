#pragma once

#include <vector>

namespace hrc {

struct HullProjection {
  std::vector<double> point;
  /// Convex weights over the input vertices.
  std::vector<double> lambdas;
  double distance = 0.0;
  int iterations = 0;
  /// Largest descent available towards any vertex, max_j -g·(v_j - x).
  double gap = 0.0;
};

/// Euclidean projection of `target` onto the convex hull of `vertices` by
/// away-step Frank-Wolfe. Stops once the duality gap is at most `tol`.
HullProjection project_onto_hull(const std::vector<double>& target, const std::vector<std::vector<double>>& vertices,
                                 double tol = 1e-6, int max_iterations = 10000);

double distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hrc
