#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrc/clustering.hpp"
#include "hrc/demos.hpp"
#include "hrc/domain.hpp"
#include "hrc/humans.hpp"
#include "hrc/irl.hpp"
#include "hrc/momdp.hpp"
#include "hrc/solver.hpp"

namespace hrc {

struct TrainConfig {
  int k_min = 2;
  int k_max = 10;
  int restarts = 20;
  std::uint64_t seed = 0;
  EmOptions em;
  double irl_epsilon = 0.01;
  int irl_max_iterations = 50;
  SolverOptions solver;
  int threads = 1;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Everything produced by training; `domain` carries one human response per
/// type tagged "0".."k-1".
struct TrainedBundle {
  TaskDomain domain;
  DemoSet demos;
  ClusterModel model;
  std::vector<RewardSpec> rewards;
  Momdp momdp;
  PolicyValue policy;
  nlohmann::json metadata = nlohmann::json::object();

  int k() const { return model.k; }
};

/// Sequences of `demos` grouped by their cluster in `model`.
std::vector<std::vector<DemoSequence>> sequences_by_cluster(const std::vector<DemoSequence>& demos,
                                                            const ClusterModel& model);

/// Task-step trajectories of demonstrations (robot decision points).
std::vector<std::vector<int>> demo_trajectories(const TaskDomain& domain, const std::vector<DemoSequence>& seqs);

/// IRL on the fixed-type MDP of `tag` with indicator features.
RewardSpec learn_reward(const TaskDomain& domain, const std::string& tag, const std::vector<DemoSequence>& seqs,
                        double epsilon, int max_iterations, std::uint64_t seed);

/// cluster → per-type responses → IRL per type → assemble → solve.
/// Stage failures are rethrown as hrc::Error prefixed with the stage name.
TrainedBundle train(const DemoSet& demos, const TaskDomain& domain, const TrainConfig& config);

/// Posterior over types from a user's own demonstrations.
Belief infer_type_offline(const TrainedBundle& bundle, const std::vector<DemoSequence>& user_demos);

struct TurnRecord {
  int step = 0;
  Belief belief;
  int robot_action = 0;  // alphabet id
  int human_action = 0;  // alphabet id
  int observation = 0;
  int next_step = 0;
  Belief next_belief;
  /// The observation was impossible under every type and the belief was
  /// reset to the prior.
  bool belief_reset = false;
};

struct Transcript {
  std::vector<TurnRecord> turns;
  bool terminal = false;
};

nlohmann::json to_json(const TaskDomain& domain, const TurnRecord& t);
nlohmann::json to_json(const TaskDomain& domain, const Transcript& t);

/// Robot choice given the task-step and the current belief; returns an alphabet id.
using RobotPolicy = std::function<int(int step, const Belief& belief)>;

RobotPolicy momdp_robot(const TrainedBundle& bundle);

/// One filtered turn: resolves the next step, updates the belief with the Bayes filter
/// (falling back to `prior` on an impossible observation). Throws
/// ValidationError naming the legal actions when `human_action` is invalid.
TurnRecord step_turn(const TaskDomain& domain, const Momdp& momdp, int step, const Belief& belief, int robot_action,
                     int human_action, const Belief& prior);

/// Executes until a terminal step or `max_turns`.
Transcript run_task_episode(const TaskDomain& domain, const Momdp& momdp, const RobotPolicy& robot, HumanSource& human,
                            const Belief& initial_belief, int max_turns = 50);

Transcript run_episode(const TrainedBundle& bundle, HumanSource& human, const Belief& initial_belief,
                       int max_turns = 50);

/// model.json content: the cluster model plus the demonstrations it was fitted on.
nlohmann::json model_file_json(const DemoSet& demos, const ClusterModel& model);
std::pair<DemoSet, ClusterModel> model_file_from_json(const nlohmann::json& j);

}  // namespace hrc
