#include "hrc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hrc/errors.hpp"

namespace hrc {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

HullProjection project_onto_hull(const std::vector<double>& target, const std::vector<std::vector<double>>& vertices,
                                 double tol, int max_iterations) {
  if (vertices.empty()) throw Error("projection onto an empty hull");
  const std::size_t m = vertices.size();
  const std::size_t d = target.size();
  for (const auto& v : vertices)
    if (v.size() != d) throw Error("hull vertex dimension differs from target");

  HullProjection r;
  r.lambdas.assign(m, 0.0);
  std::size_t nearest = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (distance(vertices[j], target) < distance(vertices[nearest], target)) nearest = j;
  r.lambdas[nearest] = 1.0;
  r.point = vertices[nearest];

  std::vector<double> grad(d), dir(d);
  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    for (std::size_t i = 0; i < d; ++i) grad[i] = r.point[i] - target[i];
    const double gx = dot(grad, r.point);
    std::size_t fw = 0, away = m;
    double fw_val = std::numeric_limits<double>::infinity();
    double away_val = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      double gv = dot(grad, vertices[j]);
      if (gv < fw_val) {
        fw_val = gv;
        fw = j;
      }
      if (r.lambdas[j] > 0.0 && gv > away_val) {
        away_val = gv;
        away = j;
      }
    }
    r.gap = gx - fw_val;
    if (r.gap <= tol) break;

    double max_step;
    std::size_t vertex;
    bool toward;
    if (gx - fw_val >= away_val - gx || away == m) {
      for (std::size_t i = 0; i < d; ++i) dir[i] = vertices[fw][i] - r.point[i];
      max_step = 1.0;
      vertex = fw;
      toward = true;
    } else {
      for (std::size_t i = 0; i < d; ++i) dir[i] = r.point[i] - vertices[away][i];
      max_step = r.lambdas[away] / (1.0 - r.lambdas[away]);
      vertex = away;
      toward = false;
    }
    const double dd = dot(dir, dir);
    if (dd <= 0.0) break;
    const double step = std::clamp(-dot(grad, dir) / dd, 0.0, max_step);
    if (step <= 0.0) break;
    for (std::size_t i = 0; i < d; ++i) r.point[i] += step * dir[i];
    if (toward) {
      for (double& l : r.lambdas) l *= 1.0 - step;
      r.lambdas[vertex] += step;
    } else {
      for (double& l : r.lambdas) l *= 1.0 + step;
      r.lambdas[vertex] -= step;
      if (step >= max_step) r.lambdas[vertex] = 0.0;
    }
  }
  // Recompute from the weights so point and lambdas agree exactly.
  double total = 0.0;
  for (double& l : r.lambdas) {
    l = std::max(l, 0.0);
    total += l;
  }
  std::fill(r.point.begin(), r.point.end(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    r.lambdas[j] /= total;
    for (std::size_t i = 0; i < d; ++i) r.point[i] += r.lambdas[j] * vertices[j][i];
  }
  r.distance = distance(r.point, target);
  return r;
}

}  // namespace hrc
