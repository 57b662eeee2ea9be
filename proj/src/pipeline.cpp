#include "hrc/pipeline.hpp"

#include <algorithm>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

nlohmann::json to_json(const TrainConfig& c) {
  return {{"k_min", c.k_min},
          {"k_max", c.k_max},
          {"restarts", c.restarts},
          {"seed", c.seed},
          {"em_max_iterations", c.em.max_iterations},
          {"uniform_prior", c.em.uniform_prior},
          {"irl_epsilon", c.irl_epsilon},
          {"irl_max_iterations", c.irl_max_iterations},
          {"solver_points", c.solver.n_points},
          {"solver_residual", c.solver.residual_tol},
          {"solver_max_sweeps", c.solver.max_sweeps}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.k_min = j.value("k_min", c.k_min);
  c.k_max = j.value("k_max", c.k_max);
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  c.em.max_iterations = j.value("em_max_iterations", c.em.max_iterations);
  c.em.uniform_prior = j.value("uniform_prior", c.em.uniform_prior);
  c.irl_epsilon = j.value("irl_epsilon", c.irl_epsilon);
  c.irl_max_iterations = j.value("irl_max_iterations", c.irl_max_iterations);
  c.solver.n_points = j.value("solver_points", c.solver.n_points);
  c.solver.residual_tol = j.value("solver_residual", c.solver.residual_tol);
  c.solver.max_sweeps = j.value("solver_max_sweeps", c.solver.max_sweeps);
  c.solver.seed = c.seed;
  return c;
}

std::vector<std::vector<DemoSequence>> sequences_by_cluster(const std::vector<DemoSequence>& demos,
                                                            const ClusterModel& model) {
  std::vector<std::vector<DemoSequence>> out(static_cast<std::size_t>(model.k));
  for (std::size_t i = 0; i < demos.size(); ++i) out[static_cast<std::size_t>(model.assignments.at(i))].push_back(demos[i]);
  return out;
}

std::vector<std::vector<int>> demo_trajectories(const TaskDomain& domain, const std::vector<DemoSequence>& seqs) {
  std::vector<std::vector<int>> out;
  for (const auto& s : seqs) out.push_back(replay_states(domain, s));
  return out;
}

RewardSpec learn_reward(const TaskDomain& domain, const std::string& tag, const std::vector<DemoSequence>& seqs,
                        double epsilon, int max_iterations, std::uint64_t seed) {
  const Mdp mdp = reduce_to_mdp(domain, tag);
  RewardSpec spec;
  spec.phi = indicator_features(mdp.num_states);
  const auto mu = empirical_feature_expectations(demo_trajectories(domain, seqs), spec.phi, mdp.discount);
  IrlOptions opt;
  opt.epsilon = epsilon;
  opt.max_iterations = max_iterations;
  opt.seed = seed;
  const auto result = irl_learn(mdp, spec.phi, mu, opt);
  spec.weights = result.weights;
  spec.report = to_json(result);
  return spec;
}

TrainedBundle train(const DemoSet& demos, const TaskDomain& domain, const TrainConfig& config) {
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& ex) {
      throw Error(std::string(name) + ": " + ex.what());
    }
  };
  if (!(demos.alphabet == domain.alphabet)) throw Error("train: demonstrations and domain use different alphabets");
  TrainedBundle b;
  b.demos = demos;
  b.model = stage("cluster", [&] {
    return select_best_model(demos.sequences, demos.alphabet.size(), config.k_min, config.k_max, config.restarts,
                             config.seed, config.em, config.threads);
  });
  const auto groups = sequences_by_cluster(demos.sequences, b.model);
  b.domain = stage("responses", [&] { return with_type_responses(domain, groups); });
  for (int z = 0; z < b.model.k; ++z)
    b.rewards.push_back(stage("irl", [&] {
      return learn_reward(b.domain, type_tag(z), groups[static_cast<std::size_t>(z)], config.irl_epsilon,
                          config.irl_max_iterations, derive_seed(config.seed, {0x1e1, static_cast<std::uint64_t>(z)}));
    }));
  b.momdp = stage("assemble", [&] { return assemble_momdp(b.domain, b.model.k, b.rewards); });
  SolverOptions solver = config.solver;
  solver.seed = derive_seed(config.seed, {0x501});
  b.policy = stage("solve", [&] { return solve_point_based(b.momdp, solver); });
  b.metadata = {{"config", to_json(config)}, {"k", b.model.k}, {"domain", domain.name}};
  return b;
}

Belief infer_type_offline(const TrainedBundle& bundle, const std::vector<DemoSequence>& user_demos) {
  if (user_demos.empty()) throw Error("offline inference needs at least one demonstration");
  return posterior_over_types(user_demos, bundle.model);
}

nlohmann::json to_json(const TaskDomain& d, const TurnRecord& t) {
  return {{"step", d.steps[static_cast<std::size_t>(t.step)]},
          {"belief", t.belief},
          {"robot_action", d.alphabet.label(t.robot_action)},
          {"human_action", d.alphabet.label(t.human_action)},
          {"next_step", d.steps[static_cast<std::size_t>(t.next_step)]},
          {"next_belief", t.next_belief},
          {"belief_reset", t.belief_reset}};
}

nlohmann::json to_json(const TaskDomain& d, const Transcript& t) {
  auto turns = nlohmann::json::array();
  for (const auto& r : t.turns) turns.push_back(to_json(d, r));
  return {{"turns", turns}, {"terminal", t.terminal}};
}

RobotPolicy momdp_robot(const TrainedBundle& bundle) {
  return [&bundle](int step, const Belief& b) {
    return bundle.domain.alphabet.robot_actions()[static_cast<std::size_t>(best_action(bundle.policy, step, b))];
  };
}

TurnRecord step_turn(const TaskDomain& domain, const Momdp& momdp, int step, const Belief& belief, int robot_action,
                     int human_action, const Belief& prior) {
  const auto legal = legal_human_actions(domain, step, robot_action);
  auto next = std::find(legal.begin(), legal.end(), human_action) != legal.end()
                  ? resolve_turn(domain, step, robot_action, human_action)
                  : std::nullopt;
  if (!next) {
    std::string names;
    for (int h : legal) names += (names.empty() ? "" : ", ") + domain.alphabet.label(h);
    throw ValidationError("'" + (human_action >= 0 && human_action < domain.alphabet.size()
                                     ? domain.alphabet.label(human_action)
                                     : std::to_string(human_action)) +
                          "' is not a legal response; legal: " + names);
  }
  TurnRecord t;
  t.step = step;
  t.belief = belief;
  t.robot_action = robot_action;
  t.human_action = human_action;
  t.observation = observation_of(domain, human_action);
  t.next_step = *next;
  try {
    t.next_belief = belief_update(momdp, belief, step, domain.alphabet.actor_index(robot_action), *next, t.observation);
  } catch (const ImpossibleObservation&) {
    t.next_belief = prior;
    t.belief_reset = true;
  }
  return t;
}

Transcript run_task_episode(const TaskDomain& domain, const Momdp& momdp, const RobotPolicy& robot, HumanSource& human,
                            const Belief& initial_belief, int max_turns) {
  Transcript tr;
  int x = domain.initial;
  Belief b = initial_belief;
  for (int turn = 0; turn < max_turns && !domain.is_terminal(x); ++turn) {
    const int a = robot(x, b);
    const auto legal = legal_human_actions(domain, x, a);
    if (legal.empty()) throw Error("no legal human response at task-step '" + domain.steps[static_cast<std::size_t>(x)] + "'");
    const int h = human.respond(x, a, legal);
    tr.turns.push_back(step_turn(domain, momdp, x, b, a, h, initial_belief));
    x = tr.turns.back().next_step;
    b = tr.turns.back().next_belief;
  }
  tr.terminal = domain.is_terminal(x);
  return tr;
}

Transcript run_episode(const TrainedBundle& bundle, HumanSource& human, const Belief& initial_belief, int max_turns) {
  return run_task_episode(bundle.domain, bundle.momdp, momdp_robot(bundle), human, initial_belief, max_turns);
}

nlohmann::json model_file_json(const DemoSet& demos, const ClusterModel& model) {
  auto j = to_json(model);
  auto d = to_json(demos);
  j["alphabet"] = d["alphabet"];
  j["sequences"] = d["sequences"];
  return j;
}

std::pair<DemoSet, ClusterModel> model_file_from_json(const nlohmann::json& j) {
  try {
    DemoSet demos = demonstrations_from_json({{"alphabet", j.at("alphabet")}, {"sequences", j.at("sequences")}}, "model");
    ClusterModel model = cluster_model_from_json(j);
    if (model.assignments.size() != demos.sequences.size())
      throw ParseError("model", "assignment count differs from sequence count");
    return {std::move(demos), std::move(model)};
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("model", ex.what());
  }
}

}  // namespace hrc
