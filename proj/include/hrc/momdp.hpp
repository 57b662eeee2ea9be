#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hrc/clustering.hpp"
#include "hrc/domain.hpp"
#include "hrc/mdp.hpp"

namespace hrc {

/// Learned reward of one human type: R(x, a) = w·φ(x) + c(x, a).
struct RewardSpec {
  FeatureMap phi;
  std::vector<double> weights;
  ActionCosts action_costs;
  nlohmann::json report;  // convergence report of the learning run

  std::vector<double> state_reward() const { return state_rewards(phi, weights); }
};

nlohmann::json to_json(const RewardSpec& r);
RewardSpec reward_spec_from_json(const nlohmann::json& j);
nlohmann::json rewards_to_json(const std::vector<RewardSpec>& rewards);
std::vector<RewardSpec> rewards_from_json(const nlohmann::json& j);

/// Mixed-observability model over observable task-steps x and a hidden
/// type y. Observations are emitted after each transition.
struct Momdp {
  int num_x = 0;
  int num_y = 0;
  int num_actions = 0;
  int num_obs = 0;
  double discount = 0.95;
  std::vector<std::string> x_labels;
  std::vector<std::string> action_labels;
  std::vector<std::string> obs_labels;

  /// T_x(x' | x, y, a) at tx[(x * Y + y) * A + a].
  std::vector<SparseRow> tx;
  /// T_y(y' | x, y, a, x') at ty[((x * A + a) * X + x') * Y + y]; empty
  /// means the type never changes.
  std::vector<std::vector<double>> ty;
  /// Distinct observation rows; O(o | x', a, y') = obs_rows[obs_index[(x' * A + a) * Y + y']][o].
  std::vector<std::vector<double>> obs_rows;
  std::vector<int> obs_index;
  /// R(x, y, a) at reward[(x * Y + y) * A + a].
  std::vector<double> reward;
  std::vector<bool> terminal;
  int initial_x = 0;
  std::vector<double> initial_belief;

  const SparseRow& tx_row(int x, int y, int a) const {
    return tx[(static_cast<std::size_t>(x) * num_y + y) * num_actions + a];
  }
  double tx_prob(int x, int y, int a, int x2) const;
  double ty_prob(int x, int y, int a, int x2, int y2) const;
  int obs_row_id(int x2, int a, int y2) const {
    return obs_index[(static_cast<std::size_t>(x2) * num_actions + a) * num_y + y2];
  }
  double obs_prob(int x2, int a, int y2, int o) const {
    return obs_rows[static_cast<std::size_t>(obs_row_id(x2, a, y2))][static_cast<std::size_t>(o)];
  }
  double r(int x, int y, int a) const { return reward[(static_cast<std::size_t>(x) * num_y + y) * num_actions + a]; }
  bool is_terminal(int x) const { return terminal[static_cast<std::size_t>(x)]; }
  /// True when O(· | x', a, y') does not depend on y'.
  bool obs_type_independent(int x2, int a) const;
};

std::vector<std::string> validate_momdp(const Momdp& m);

using Belief = std::vector<double>;

Belief uniform_belief(int num_y);

/// b'(y') = η O(o | x', a, y') Σ_y T_x(x' | x, y, a) T_y(y' | x, y, a, x') b(y).
/// Throws ImpossibleObservation when the normalizer vanishes.
Belief belief_update(const Momdp& m, const Belief& b, int x, int a, int x2, int o);

/// Builds the MOMDP of a task domain whose type-y human response is tagged
/// type_tag(y). Observations are the human's actions; because the human
/// action is recoverable from (x, a, x'), O is uniform and type evidence
/// enters through T_x. Terminal steps carry no reward: the terminal step's
/// state reward is collected once, on the transition into it.
Momdp assemble_momdp(const TaskDomain& domain, int k, const std::vector<RewardSpec>& rewards,
                     const Belief& initial_belief = {});

/// Observation index of a human action in an assembled MOMDP.
int observation_of(const TaskDomain& domain, int human_action);

nlohmann::json to_json(const Momdp& m);
Momdp momdp_from_json(const nlohmann::json& j);

}  // namespace hrc
