#include "hrc/humans.hpp"

#include <algorithm>

#include "hrc/errors.hpp"

namespace hrc {

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

ScriptedHuman::ScriptedHuman(std::vector<int> base, std::optional<int> fallback)
    : base_(std::move(base)), fallback_(fallback) {}

int ScriptedHuman::scripted(const std::vector<int>& legal) {
  while (next_ < base_.size()) {
    int h = base_[next_++];
    if (contains(legal, h)) return h;
  }
  if (fallback_ && contains(legal, *fallback_)) return *fallback_;
  return legal.front();
}

int ScriptedHuman::respond(int, int, const std::vector<int>& legal) { return scripted(legal); }

EpsilonHuman::EpsilonHuman(std::vector<int> base, double epsilon, std::uint64_t seed, std::vector<int> deviations,
                           std::optional<int> fallback)
    : ScriptedHuman(std::move(base), fallback), epsilon_(epsilon), rng_(seed), deviations_(std::move(deviations)) {
  if (epsilon < 0.0 || epsilon > 1.0) throw Error("epsilon must lie in [0, 1]");
}

int EpsilonHuman::respond(int, int, const std::vector<int>& legal) {
  // Draw every turn so the random stream does not depend on the policy.
  const double u = uniform01(rng_);
  std::vector<int> options;
  for (int h : legal)
    if (deviations_.empty() || contains(deviations_, h)) options.push_back(h);
  const int pick = options.empty() ? 0 : uniform_index(rng_, static_cast<int>(options.size()));
  if (u < epsilon_ && !options.empty()) return options[static_cast<std::size_t>(pick)];
  return scripted(legal);
}

SimulatedHuman::SimulatedHuman(const TaskDomain& domain, std::string tag, std::uint64_t seed)
    : domain_(domain), tag_(std::move(tag)), rng_(seed) {
  if (!domain.has_tag(tag_)) throw Error("simulated human: domain has no response tagged '" + tag_ + "'");
}

int SimulatedHuman::respond(int step, int robot_action, const std::vector<int>&) {
  const auto& row = domain_.response(tag_, step, robot_action);
  if (row.empty()) throw Error("simulated human: no response defined at this task-step");
  std::vector<double> w;
  for (const auto& o : row) w.push_back(o.prob);
  return row[static_cast<std::size_t>(sample_index(rng_, w))].human_action;
}

std::vector<int> human_actions_of(const ActionAlphabet& alphabet, const std::vector<int>& actions) {
  std::vector<int> out;
  for (int a : actions)
    if (alphabet.is_human(a)) out.push_back(a);
  return out;
}

}  // namespace hrc
