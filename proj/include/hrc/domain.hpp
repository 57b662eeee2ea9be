#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrc/alphabet.hpp"
#include "hrc/demos.hpp"

namespace hrc {

/// Joint outcome of one human response: the action the human takes and the
/// task-step the team lands in after the whole turn.
struct Outcome {
  int human_action = 0;
  int next_step = 0;
  double prob = 0.0;

  bool operator==(const Outcome&) const = default;
};

/// Per (task-step, robot action) distribution over outcomes. Rows are stored
/// at `step * num_robot_actions + robot_index`; an empty row means undefined.
using ResponseTable = std::vector<std::vector<Outcome>>;

/// Tag for the structural response shared by all human types.
inline constexpr std::string_view kAnyType = "*";

/// A turn-taking collaborative task. Each turn the robot acts at an
/// observable task-step, then the human responds; `responses` gives the
/// distribution over the human's action and the resulting task-step for
/// each human-type tag.
struct TaskDomain {
  std::string name;
  ActionAlphabet alphabet;
  std::vector<std::string> steps;
  int initial = 0;
  std::vector<int> terminal;
  /// Robot action implied before a demonstration that starts with a human action.
  std::optional<int> idle_action;
  std::map<std::string, ResponseTable> responses;
  double discount = 0.95;

  int num_steps() const { return static_cast<int>(steps.size()); }
  int num_robot_actions() const { return static_cast<int>(alphabet.robot_actions().size()); }
  bool is_terminal(int step) const;
  std::optional<int> find_step(std::string_view label) const;
  int step_id(std::string_view label) const;

  bool has_tag(const std::string& tag) const { return responses.count(tag) != 0; }
  /// Outcome row for a robot action given by alphabet id.
  const std::vector<Outcome>& response(const std::string& tag, int step, int robot_action) const;
  std::vector<Outcome>& response_row(const std::string& tag, int step, int robot_action);

  bool operator==(const TaskDomain&) const = default;
};

/// Every invariant violation as a readable message; empty iff valid.
std::vector<std::string> validate_domain(const TaskDomain& domain);

TaskDomain load_domain(const std::filesystem::path& path);
TaskDomain domain_from_json(const nlohmann::json& j, const std::string& origin = "domain");
nlohmann::json to_json(const TaskDomain& domain);
void save_domain(const TaskDomain& domain, const std::filesystem::path& path);

/// Human actions with positive probability after `robot_action` at `step`,
/// over all tags, sorted by id.
std::vector<int> legal_human_actions(const TaskDomain& domain, int step, int robot_action);

/// Task-step reached when the human answers `robot_action` with
/// `human_action`. Empty when the response is impossible; throws when the
/// domain maps the pair to more than one step.
std::optional<int> resolve_turn(const TaskDomain& domain, int step, int robot_action, int human_action);

/// Replays a demonstration through the domain and returns the task-steps at
/// which the robot was about to act (the last one may be terminal).
std::vector<int> replay_states(const TaskDomain& domain, const DemoSequence& seq);

/// Pseudo-count added to every human answer when learning responses. Small
/// enough that a learned row follows the demonstrations, nonzero so every
/// structurally legal answer keeps support for belief filtering.
inline constexpr double kResponsePseudocount = 1e-3;

/// Smoothed counts n(h | x, a_r) + pseudocount of human actions answering a
/// robot action at a task-step, indexed [step * num_robot_actions + robot
/// index][human index]. A leading human action counts as an answer to the
/// idle action.
std::vector<std::vector<double>> response_counts(const TaskDomain& domain, const std::vector<DemoSequence>& seqs,
                                                 double pseudocount = kResponsePseudocount);

/// The structural response reweighted by smoothed answer counts learned from
/// `seqs`, renormalized per row. Rows never observed keep the structural
/// distribution.
ResponseTable learn_response(const TaskDomain& domain, const std::vector<DemoSequence>& seqs,
                             double pseudocount = kResponsePseudocount);

/// Copy of `domain` with one learned response table per type, tagged "0".."k-1".
TaskDomain with_type_responses(const TaskDomain& domain, const std::vector<std::vector<DemoSequence>>& per_type,
                               double pseudocount = kResponsePseudocount);

std::string type_tag(int type);

}  // namespace hrc
