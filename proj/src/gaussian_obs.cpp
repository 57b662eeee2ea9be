#include "hrc/gaussian_obs.hpp"

#include <cmath>

#include "hrc/errors.hpp"

namespace hrc {

std::vector<std::vector<double>> build_gaussian_obs(const GaussianObsModel& g) {
  if (g.width < 1 || g.height < 1) throw ValidationError("observation grid must be non-empty");
  if (g.means.size() != g.covariances.size()) throw ValidationError("one covariance per mean is required");
  std::vector<std::vector<double>> rows;
  for (int t = 0; t < g.num_types(); ++t) {
    const auto [a, b, c, d] = g.covariances[static_cast<std::size_t>(t)];
    const double det = a * d - b * c;
    if (std::abs(b - c) > 1e-12 || !(a > 0.0) || !(det > 0.0))
      throw ValidationError("covariance of type " + std::to_string(t) + " is not symmetric positive definite");
    // Inverse of [[a, b], [b, d]].
    const double ia = d / det, ib = -b / det, id = a / det;
    std::vector<double> row(static_cast<std::size_t>(g.num_cells()));
    double total = 0.0;
    for (int j = 0; j < g.height; ++j)
      for (int i = 0; i < g.width; ++i) {
        const double dx = i + 0.5 - g.means[static_cast<std::size_t>(t)][0];
        const double dy = j + 0.5 - g.means[static_cast<std::size_t>(t)][1];
        const double v = std::exp(-0.5 * (ia * dx * dx + 2.0 * ib * dx * dy + id * dy * dy));
        row[static_cast<std::size_t>(j * g.width + i)] = v;
        total += v;
      }
    for (double& v : row) v /= total;
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const GaussianObsModel& g) {
  return {{"width", g.width}, {"height", g.height}, {"means", g.means}, {"covariances", g.covariances}};
}

GaussianObsModel gaussian_obs_from_json(const nlohmann::json& j) {
  try {
    GaussianObsModel g;
    g.width = j.at("width").get<int>();
    g.height = j.at("height").get<int>();
    g.means = j.at("means").get<std::vector<std::array<double, 2>>>();
    g.covariances = j.at("covariances").get<std::vector<std::array<double, 4>>>();
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("gaussian observation model", ex.what());
  }
}

}  // namespace hrc
