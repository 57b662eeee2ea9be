#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hrc/domain.hpp"

namespace hrc {

/// Sparse distribution over next states.
using SparseRow = std::vector<std::pair<int, double>>;

/// Finite discounted MDP. Terminal states end the process: their reward (and
/// feature vector) is counted once on arrival. A non-terminal state whose
/// rows loop on itself recurs as usual.
struct Mdp {
  int num_states = 0;
  int num_actions = 0;
  double discount = 0.95;
  /// transitions[s][a]; rows of terminal states are ignored.
  std::vector<std::vector<SparseRow>> transitions;
  std::vector<bool> terminal;
  int start = 0;

  const SparseRow& row(int s, int a) const {
    return transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  }
  bool is_terminal(int s) const { return terminal[static_cast<std::size_t>(s)]; }
};

/// Every invariant violation of `mdp`; empty iff valid.
std::vector<std::string> validate_mdp(const Mdp& mdp);

/// Fixed-type MDP over task-steps with robot actions (by actor index) as
/// actions, using the human response tagged `tag`.
Mdp reduce_to_mdp(const TaskDomain& domain, const std::string& tag);

/// State features with entries in [0, 1].
struct FeatureMap {
  int dimension = 0;
  /// features[s] has length `dimension`.
  std::vector<std::vector<double>> features;
  std::string kind = "table";

  const std::vector<double>& operator()(int s) const { return features[static_cast<std::size_t>(s)]; }
};

FeatureMap indicator_features(int num_states);
nlohmann::json to_json(const FeatureMap& phi);
FeatureMap feature_map_from_json(const nlohmann::json& j);

/// Optional additive per-(state, action) reward; empty means zero.
using ActionCosts = std::vector<std::vector<double>>;

std::vector<double> state_rewards(const FeatureMap& phi, const std::vector<double>& weights);

struct ValueResult {
  std::vector<int> policy;
  std::vector<double> values;
  int iterations = 0;
  double residual = 0.0;
};

/// Q(s, a) = R(s) + c(s, a) + γ Σ T(s'|s,a) V(s') for non-terminal s;
/// V(terminal) = R(terminal).
double q_value(const Mdp& mdp, const std::vector<double>& reward, const ActionCosts& costs,
               const std::vector<double>& values, int s, int a);

/// Iterates until the Bellman residual is at most `tol`. Ties in the greedy
/// policy go to the lowest action index within 1e-9.
ValueResult value_iteration(const Mdp& mdp, const std::vector<double>& reward, const ActionCosts& costs = {},
                            double tol = 1e-8, int max_iterations = 100000);

/// Exact value of a deterministic policy (linear solve).
std::vector<double> policy_values(const Mdp& mdp, const std::vector<int>& policy, const std::vector<double>& reward,
                                  const ActionCosts& costs = {});

/// μ(π) = E[Σ_t γ^t φ(s_t)] from the discounted occupancy linear system.
std::vector<double> feature_expectations(const Mdp& mdp, const std::vector<int>& policy, const FeatureMap& phi,
                                         const std::vector<double>& start);

struct MonteCarloEstimate {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Rollout estimate of μ(π), truncated where γ^t < 1e-6.
MonteCarloEstimate feature_expectations_mc(const Mdp& mdp, const std::vector<int>& policy, const FeatureMap& phi,
                                           const std::vector<double>& start, int rollouts, std::uint64_t seed);

/// Mean over trajectories of Σ_t γ^t φ(s_t).
std::vector<double> empirical_feature_expectations(const std::vector<std::vector<int>>& trajectories,
                                                   const FeatureMap& phi, double discount);

std::vector<double> one_hot(int size, int index);

}  // namespace hrc
