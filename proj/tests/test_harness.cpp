#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hrc/harness.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

const synthetic::LabeledCorpus& small_corpus() {
  static const auto c = [] {
    synthetic::PlaceDrillConfig pc;
    pc.per_type = 3;
    return synthetic::place_drill_corpus(pc, 4);
  }();
  return c;
}

const std::vector<Fold>& small_folds() {
  static const auto folds = [] {
    TrainConfig config;
    config.k_max = 3;
    config.restarts = 5;
    config.seed = 2;
    config.solver.seed = 2;
    config.solver.n_points = 300;
    return cross_validate(small_corpus().demos, place_drill::make_domain(), config, 2);
  }();
  return folds;
}

Scorer truth_scorer() {
  return [](const std::string& subject, int step, int robot) {
    const auto& labels = small_corpus().subject_labels;
    return place_drill::true_reward(synthetic::preference_of(labels.at(subject)), step, robot);
  };
}

RobustnessConfig small_config() {
  RobustnessConfig c;
  c.epsilons = {0.0, 0.5, 1.0};
  c.reps = 6;
  c.seed = 21;
  c.deviation_actions = {place_drill::place(0), place_drill::place(1), place_drill::place(2)};
  c.fallback = place_drill::kWait;
  return c;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("best mapping accuracy agrees with brute force over relabellings") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + uniform_index(rng, 3);
    std::vector<int> predicted, labels;
    for (int i = 0; i < 15; ++i) {
      predicted.push_back(uniform_index(rng, k));
      labels.push_back(uniform_index(rng, k));
    }
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
      int hits = 0;
      for (std::size_t i = 0; i < predicted.size(); ++i) hits += perm[static_cast<std::size_t>(predicted[i])] == labels[i];
      best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(best_mapping_accuracy(predicted, labels, k) == doctest::Approx(best / 15.0));
  }
}

TEST_CASE("folds hold out exactly one subject") {
  const auto& folds = small_folds();
  CHECK(folds.size() == small_corpus().subject_labels.size());
  for (const auto& f : folds) {
    CHECK_FALSE(f.held_out_demos.empty());
    for (const auto& s : f.bundle.demos.sequences) CHECK(s.subject != f.held_out);
    for (const auto& [subject, _] : f.training) CHECK(subject != f.held_out);
  }
}

TEST_CASE("held-out subjects are classified correctly") {
  CHECK(classification_accuracy(small_folds(), small_corpus().subject_labels) == doctest::Approx(1.0));
}

TEST_CASE("plot data is recomputable from the episode table") {
  const auto report = evaluate_robustness(small_folds(), small_config(), truth_scorer());
  const auto dir = std::filesystem::temp_directory_path() / "hrc_harness_csv";
  std::filesystem::create_directories(dir);
  emit_plot_data(report, dir / "plot.csv");
  emit_episodes(report, dir / "episodes.csv");
  const auto plot = read_csv(dir / "plot.csv");
  const auto episodes = read_csv(dir / "episodes.csv");
  REQUIRE(plot.front() == std::vector<std::string>{"epsilon", "policy", "mean", "stderr", "n"});
  REQUIRE(episodes.front() == std::vector<std::string>{"subject", "epsilon", "policy", "rep", "reward"});
  CHECK(plot.size() == 1 + 3 * 2);
  CHECK(episodes.size() == 1 + small_folds().size() * 3 * 6 * 2);
  for (std::size_t r = 1; r < plot.size(); ++r) {
    std::vector<double> v;
    for (std::size_t e = 1; e < episodes.size(); ++e)
      if (std::stod(episodes[e][1]) == std::stod(plot[r][0]) && episodes[e][2] == plot[r][1])
        v.push_back(std::stod(episodes[e][4]));
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(std::stoul(plot[r][4]) == v.size());
    CHECK(std::stod(plot[r][2]) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(std::stod(plot[r][3]) == doctest::Approx(std::sqrt(ss / (n - 1.0) / n)).epsilon(1e-9));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("robustness reports are reproducible bit for bit") {
  const auto a = evaluate_robustness(small_folds(), small_config(), truth_scorer());
  const auto b = evaluate_robustness(small_folds(), small_config(), truth_scorer());
  CHECK(plot_csv(a) == plot_csv(b));
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) CHECK(a.episodes[i].reward == b.episodes[i].reward);
}

TEST_CASE("both policies are scored against the held-out subject's true type") {
  std::vector<std::string> calls;
  Scorer recording = [&](const std::string& subject, int step, int robot) {
    if (calls.empty() || calls.back() != subject) calls.push_back(subject);
    return truth_scorer()(subject, step, robot);
  };
  auto config = small_config();
  config.reps = 2;
  const auto report = evaluate_robustness(small_folds(), config, recording);
  // Folds run in order and every call within a fold names its held-out subject.
  REQUIRE(calls.size() == small_folds().size());
  for (std::size_t f = 0; f < calls.size(); ++f) CHECK(calls[f] == small_folds()[f].held_out);
  for (const auto& e : report.episodes) CHECK(std::find(calls.begin(), calls.end(), e.subject) != calls.end());
}

TEST_CASE("the per-user baseline is trained on the user's demonstrations alone") {
  const auto& f = small_folds().front();
  const auto b = baseline_per_user_mdp(f.held_out_demos, place_drill::make_domain(), 0.01, 50, 3);
  CHECK(b.domain.has_tag(type_tag(0)));
  CHECK(b.policy.size() == 27);
  for (int x = 0; x < 27; ++x) CHECK(b.domain.alphabet.is_robot(b.act(x)));
}

}  // TEST_SUITE
