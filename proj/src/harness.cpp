#include "hrc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

std::vector<Fold> cross_validate(const DemoSet& demos, const TaskDomain& domain, const TrainConfig& config,
                                 int threads) {
  const auto groups = group_by_subject(demos.sequences);
  if (groups.size() < 2) throw Error("cross-validation needs at least two subjects");
  std::vector<Fold> folds(groups.size());
  auto run = [&](std::size_t f) {
    Fold& fold = folds[f];
    fold.held_out = groups[f].first;
    fold.held_out_demos = groups[f].second;
    DemoSet train_set{demos.alphabet, {}};
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (g == f) continue;
      fold.training.push_back(groups[g]);
      for (const auto& s : groups[g].second) train_set.sequences.push_back(s);
    }
    fold.bundle = train(train_set, domain, config);
  };
  if (threads <= 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run(f);
  } else {
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < folds.size() || !pending.empty()) {
      while (next < folds.size() && pending.size() < static_cast<std::size_t>(threads))
        pending.push_back(std::async(std::launch::async, run, next++));
      pending.front().get();
      pending.erase(pending.begin());
    }
  }
  return folds;
}

int predict_subject(const ClusterModel& model, const std::vector<DemoSequence>& seqs) {
  const auto votes = subject_vote(seqs, model);
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

namespace {

// Best cluster → label map by agreement on (predicted, label) pairs.
std::vector<int> best_mapping(const std::vector<int>& predicted, const std::vector<int>& labels, int k) {
  int num_labels = 0;
  for (int l : labels) num_labels = std::max(num_labels, l + 1);
  std::vector<std::vector<int>> agree(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(std::max(num_labels, 1)), 0));
  for (std::size_t i = 0; i < predicted.size(); ++i)
    ++agree[static_cast<std::size_t>(predicted[i])][static_cast<std::size_t>(labels[i])];
  std::vector<int> map(static_cast<std::size_t>(k), 0);
  if (k > num_labels) {
    for (int z = 0; z < k; ++z) {
      const auto& row = agree[static_cast<std::size_t>(z)];
      map[static_cast<std::size_t>(z)] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return map;
  }
  // Enumerate injective maps as the first k entries of label permutations.
  std::vector<int> perm(static_cast<std::size_t>(num_labels));
  std::iota(perm.begin(), perm.end(), 0);
  int best = -1;
  do {
    int score = 0;
    for (int z = 0; z < k; ++z) score += agree[static_cast<std::size_t>(z)][static_cast<std::size_t>(perm[static_cast<std::size_t>(z)])];
    if (score > best) {
      best = score;
      std::copy(perm.begin(), perm.begin() + k, map.begin());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return map;
}

}  // namespace

double best_mapping_accuracy(const std::vector<int>& predicted, const std::vector<int>& labels, int k) {
  if (predicted.empty()) return 0.0;
  const auto map = best_mapping(predicted, labels, k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (map[static_cast<std::size_t>(predicted[i])] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double subject_accuracy(const ClusterModel& model, const std::vector<DemoSequence>& demos,
                        const std::map<std::string, int>& labels) {
  std::vector<int> predicted, truth;
  for (const auto& [subject, seqs] : group_by_subject(demos)) {
    predicted.push_back(predict_subject(model, seqs));
    truth.push_back(labels.at(subject));
  }
  return best_mapping_accuracy(predicted, truth, model.k);
}

double classification_accuracy(const std::vector<Fold>& folds, const std::map<std::string, int>& labels) {
  if (folds.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& fold : folds) {
    std::vector<int> predicted, truth;
    for (const auto& [subject, seqs] : fold.training) {
      predicted.push_back(predict_subject(fold.bundle.model, seqs));
      truth.push_back(labels.at(subject));
    }
    const auto map = best_mapping(predicted, truth, fold.bundle.model.k);
    const int held = predict_subject(fold.bundle.model, fold.held_out_demos);
    if (map[static_cast<std::size_t>(held)] == labels.at(fold.held_out)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(folds.size());
}

int BaselinePolicy::act(int step) const {
  return domain.alphabet.robot_actions()[static_cast<std::size_t>(policy[static_cast<std::size_t>(step)])];
}

BaselinePolicy baseline_per_user_mdp(const std::vector<DemoSequence>& user_demos, const TaskDomain& domain,
                                     double epsilon, int max_iterations, std::uint64_t seed) {
  if (user_demos.empty()) throw Error("baseline needs at least one demonstration");
  BaselinePolicy b;
  b.domain = with_type_responses(domain, {user_demos});
  b.reward = learn_reward(b.domain, type_tag(0), user_demos, epsilon, max_iterations, seed);
  b.policy = value_iteration(reduce_to_mdp(b.domain, type_tag(0)), b.reward.state_reward(), b.reward.action_costs).policy;
  return b;
}

const ReportRow* RobustnessReport::find(double epsilon, const std::string& policy) const {
  for (const auto& r : rows)
    if (r.epsilon == epsilon && r.policy == policy) return &r;
  return nullptr;
}

std::vector<ReportRow> summarize(const std::vector<EpisodeResult>& episodes) {
  std::vector<ReportRow> rows;
  std::vector<std::vector<double>> values;
  for (const auto& e : episodes) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const ReportRow& r) { return r.epsilon == e.epsilon && r.policy == e.policy; });
    if (it == rows.end()) {
      rows.push_back({e.epsilon, e.policy, 0.0, 0.0, 0});
      values.emplace_back();
      it = std::prev(rows.end());
    }
    values[static_cast<std::size_t>(it - rows.begin())].push_back(e.reward);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = values[i];
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    rows[i].mean = mean;
    rows[i].n = v.size();
    rows[i].stderr_ = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return a.epsilon != b.epsilon ? a.epsilon < b.epsilon : a.policy < b.policy;
  });
  return rows;
}

double episode_reward(const Transcript& t, const std::string& subject, const Scorer& scorer) {
  double total = 0.0;
  for (const auto& turn : t.turns) total += scorer(subject, turn.step, turn.robot_action);
  return total;
}

RobustnessReport evaluate_robustness(const std::vector<Fold>& folds, const RobustnessConfig& c, const Scorer& scorer) {
  if (c.reps < 1) throw Error("robustness evaluation needs at least one repetition");
  RobustnessReport report;
  report.reps = c.reps;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const auto& bundle = fold.bundle;
    const Belief prior = infer_type_offline(bundle, fold.held_out_demos);
    std::optional<BaselinePolicy> baseline;
    if (c.baseline)
      baseline = baseline_per_user_mdp(fold.held_out_demos, bundle.domain, 0.01, 50, derive_seed(c.seed, {0xba5e, f}));
    const RobotPolicy momdp = momdp_robot(bundle);
    for (std::size_t e = 0; e < c.epsilons.size(); ++e)
      for (int rep = 0; rep < c.reps; ++rep) {
        const auto& base_seq = fold.held_out_demos[static_cast<std::size_t>(rep) % fold.held_out_demos.size()];
        const auto base = human_actions_of(bundle.domain.alphabet, base_seq.actions);
        const auto seed = derive_seed(c.seed, {f, e, static_cast<std::uint64_t>(rep)});
        auto play = [&](const std::string& name, const RobotPolicy& robot) {
          EpsilonHuman human(base, c.epsilons[e], seed, c.deviation_actions, c.fallback);
          const auto t = run_task_episode(bundle.domain, bundle.momdp, robot, human, prior, c.max_turns);
          report.episodes.push_back({fold.held_out, c.epsilons[e], name, rep, episode_reward(t, fold.held_out, scorer)});
        };
        play("momdp", momdp);
        if (baseline) play("baseline", [&](int step, const Belief&) { return baseline->act(step); });
      }
  }
  report.rows = summarize(report.episodes);
  return report;
}

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace

std::string plot_csv(const RobustnessReport& report) {
  std::string out = "epsilon,policy,mean,stderr,n\n";
  for (const auto& r : report.rows)
    out += num(r.epsilon) + "," + r.policy + "," + num(r.mean) + "," + num(r.stderr_) + "," + std::to_string(r.n) + "\n";
  return out;
}

void emit_plot_data(const RobustnessReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << plot_csv(report);
}

void emit_episodes(const RobustnessReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "subject,epsilon,policy,rep,reward\n";
  for (const auto& e : report.episodes)
    out << e.subject << ',' << num(e.epsilon) << ',' << e.policy << ',' << e.rep << ',' << num(e.reward) << '\n';
}

}  // namespace hrc
