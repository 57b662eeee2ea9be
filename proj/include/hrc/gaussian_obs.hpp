#pragma once

#include <array>
#include <vector>

#include <json.hpp>

namespace hrc {

/// Per-type 2-D Gaussians over a width × height grid of cells. Cell (i, j)
/// has its center at (i + 0.5, j + 0.5) and index j * width + i.
struct GaussianObsModel {
  int width = 10;
  int height = 10;
  std::vector<std::array<double, 2>> means;
  std::vector<std::array<double, 4>> covariances;  // row-major 2×2

  int num_types() const { return static_cast<int>(means.size()); }
  int num_cells() const { return width * height; }
};

/// One stochastic row over cells per type: the density at each cell center,
/// renormalized. Throws ValidationError for non-PD covariances.
std::vector<std::vector<double>> build_gaussian_obs(const GaussianObsModel& model);

nlohmann::json to_json(const GaussianObsModel& model);
GaussianObsModel gaussian_obs_from_json(const nlohmann::json& j);

}  // namespace hrc
