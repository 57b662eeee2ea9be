#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hrc/domain.hpp"
#include "hrc/random.hpp"

namespace hrc {

/// Supplies the human's answer to each robot action during execution.
class HumanSource {
 public:
  virtual ~HumanSource() = default;
  /// Human action (alphabet id) answering `robot_action` at `step`; `legal`
  /// is non-empty and sorted.
  virtual int respond(int step, int robot_action, const std::vector<int>& legal) = 0;
};

/// Replays a base list of human actions, skipping entries that are not
/// legal when reached. Once the list is exhausted it answers `fallback` if
/// legal, else the first legal action.
class ScriptedHuman : public HumanSource {
 public:
  ScriptedHuman(std::vector<int> base, std::optional<int> fallback = std::nullopt);
  int respond(int step, int robot_action, const std::vector<int>& legal) override;

 protected:
  int scripted(const std::vector<int>& legal);

 private:
  std::vector<int> base_;
  std::size_t next_ = 0;
  std::optional<int> fallback_;
};

/// Scripted human who, with probability ε per turn, instead picks uniformly
/// among the legal actions in `deviations` (all legal actions when empty),
/// or the scripted answer when none of them is legal.
class EpsilonHuman : public ScriptedHuman {
 public:
  EpsilonHuman(std::vector<int> base, double epsilon, std::uint64_t seed, std::vector<int> deviations = {},
               std::optional<int> fallback = std::nullopt);
  int respond(int step, int robot_action, const std::vector<int>& legal) override;

 private:
  double epsilon_;
  Rng rng_;
  std::vector<int> deviations_;
};

/// Samples answers from the domain's response for one type tag.
class SimulatedHuman : public HumanSource {
 public:
  SimulatedHuman(const TaskDomain& domain, std::string tag, std::uint64_t seed);
  int respond(int step, int robot_action, const std::vector<int>& legal) override;

 private:
  const TaskDomain& domain_;
  std::string tag_;
  Rng rng_;
};

/// Delegates to a callback, e.g. a terminal prompt.
class InteractiveHuman : public HumanSource {
 public:
  using Prompt = std::function<int(int step, int robot_action, const std::vector<int>& legal)>;
  explicit InteractiveHuman(Prompt prompt) : prompt_(std::move(prompt)) {}
  int respond(int step, int robot_action, const std::vector<int>& legal) override {
    return prompt_(step, robot_action, legal);
  }

 private:
  Prompt prompt_;
};

/// Human actions of a demonstration, in order.
std::vector<int> human_actions_of(const ActionAlphabet& alphabet, const std::vector<int>& actions);

}  // namespace hrc
