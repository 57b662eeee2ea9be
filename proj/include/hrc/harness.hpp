#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrc/pipeline.hpp"

namespace hrc {

struct Fold {
  std::string held_out;
  std::vector<DemoSequence> held_out_demos;
  /// Training subjects with their sequences, in corpus order.
  std::vector<std::pair<std::string, std::vector<DemoSequence>>> training;
  TrainedBundle bundle;
};

/// One bundle per held-out subject, trained on every other subject's
/// sequences. Folds run on up to `threads` workers; results are ordered by
/// subject regardless.
std::vector<Fold> cross_validate(const DemoSet& demos, const TaskDomain& domain, const TrainConfig& config,
                                 int threads = 1);

/// Type predicted for a subject: argmax of the likelihood-weighted vote.
int predict_subject(const ClusterModel& model, const std::vector<DemoSequence>& seqs);

/// Best agreement between predicted clusters and labels over injective
/// cluster → label maps (any map when there are more clusters than labels).
double best_mapping_accuracy(const std::vector<int>& predicted, const std::vector<int>& labels, int k);

/// Subject-level accuracy of one model against expert labels.
double subject_accuracy(const ClusterModel& model, const std::vector<DemoSequence>& demos,
                        const std::map<std::string, int>& labels);

/// Fraction of held-out subjects classified correctly. Each fold's cluster →
/// label map is the one that best explains that fold's training subjects.
double classification_accuracy(const std::vector<Fold>& folds, const std::map<std::string, int>& labels);

/// Per-user MDP: human responses from only this user's demonstrations,
/// reward from IRL on them, greedy value-iteration policy.
struct BaselinePolicy {
  TaskDomain domain;
  RewardSpec reward;
  std::vector<int> policy;  // robot actor index per task-step

  int act(int step) const;  // alphabet id
};

BaselinePolicy baseline_per_user_mdp(const std::vector<DemoSequence>& user_demos, const TaskDomain& domain,
                                     double epsilon = 0.01, int max_iterations = 50, std::uint64_t seed = 0);

/// Score of a robot action for a subject's true preference.
using Scorer = std::function<double(const std::string& subject, int step, int robot_action)>;

struct RobustnessConfig {
  std::vector<double> epsilons{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int reps = 100;
  bool baseline = true;
  std::uint64_t seed = 0;
  int max_turns = 50;
  /// Human actions a deviating human picks from; empty means any legal one.
  std::vector<int> deviation_actions;
  std::optional<int> fallback;
};

struct EpisodeResult {
  std::string subject;
  double epsilon = 0.0;
  std::string policy;
  int rep = 0;
  double reward = 0.0;
};

struct ReportRow {
  double epsilon = 0.0;
  std::string policy;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

struct RobustnessReport {
  int reps = 0;
  std::vector<EpisodeResult> episodes;
  std::vector<ReportRow> rows;

  const ReportRow* find(double epsilon, const std::string& policy) const;
};

/// Aggregates episode rewards into per-(ε, policy) mean and standard error.
std::vector<ReportRow> summarize(const std::vector<EpisodeResult>& episodes);

/// Runs every (fold, ε, rep) episode for the MOMDP policy and, if enabled,
/// the per-user baseline, with the same simulated human stream for both.
/// Each episode's ε-human replays one of the held-out subject's
/// demonstrations and is scored by `scorer` under that subject's preference.
RobustnessReport evaluate_robustness(const std::vector<Fold>& folds, const RobustnessConfig& config,
                                     const Scorer& scorer);

/// Accumulated score of a transcript.
double episode_reward(const Transcript& t, const std::string& subject, const Scorer& scorer);

/// CSV with columns epsilon,policy,mean,stderr,n.
void emit_plot_data(const RobustnessReport& report, const std::filesystem::path& path);
/// CSV with columns subject,epsilon,policy,rep,reward.
void emit_episodes(const RobustnessReport& report, const std::filesystem::path& path);
std::string plot_csv(const RobustnessReport& report);

}  // namespace hrc
