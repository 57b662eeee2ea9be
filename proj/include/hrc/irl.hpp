#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hrc/mdp.hpp"

namespace hrc {

struct IrlOptions {
  double epsilon = 0.01;
  int max_iterations = 50;
  std::uint64_t seed = 0;
  /// Added to the learned state reward inside every planning step.
  ActionCosts action_costs;
};

struct IrlResult {
  /// Mean of w^(i) over the second half of the iterations.
  std::vector<double> weights;
  std::vector<std::vector<int>> policies;
  std::vector<std::vector<double>> mus;
  /// Unit reward directions w^(1..n).
  std::vector<std::vector<double>> directions;
  /// Margins t^(1..n).
  std::vector<double> ts;
  /// Mixture weights over mus at the iteration with the smallest margin.
  std::vector<double> lambdas;
  double epsilon = 0.0;
  double best_margin = 0.0;
  int best_iteration = 0;
  bool converged = false;
  std::vector<double> demo_mu;
};

/// Apprenticeship learning by projection. Iteration i projects `demo_mu`
/// onto the hull of μ^(0..i-1); the margin t^(i) is the residual distance
/// and the unit residual direction becomes the reward weight for the next
/// optimal policy. Stops when t^(i) ≤ ε or after max_iterations.
IrlResult irl_learn(const Mdp& mdp, const FeatureMap& phi, const std::vector<double>& demo_mu,
                    const IrlOptions& options = {});

/// Greedy policy of the reward w·φ (plus action costs).
ValueResult induced_policy(const Mdp& mdp, const FeatureMap& phi, const std::vector<double>& weights,
                           const ActionCosts& costs = {});

nlohmann::json to_json(const IrlResult& r);

}  // namespace hrc
