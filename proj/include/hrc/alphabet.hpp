#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hrc {

enum class Actor { human, robot };

std::string_view to_string(Actor actor);
Actor actor_from_string(std::string_view s);

struct Action {
  int id = 0;
  std::string label;
  Actor actor = Actor::human;

  bool operator==(const Action&) const = default;
};

/// The joint action set A = A_h ∪ A_r. Ids are contiguous 0..|A|-1.
class ActionAlphabet {
 public:
  ActionAlphabet() = default;
  explicit ActionAlphabet(std::vector<Action> actions);

  int size() const { return static_cast<int>(actions_.size()); }
  const Action& operator[](int id) const { return actions_.at(static_cast<std::size_t>(id)); }
  const std::vector<Action>& actions() const { return actions_; }

  std::optional<int> find(std::string_view label) const;
  /// Throws hrc::Error naming the unknown label.
  int id_of(std::string_view label) const;
  const std::string& label(int id) const { return (*this)[id].label; }
  Actor actor(int id) const { return (*this)[id].actor; }
  bool is_human(int id) const { return actor(id) == Actor::human; }
  bool is_robot(int id) const { return actor(id) == Actor::robot; }

  /// Alphabet ids of human/robot actions, in id order.
  const std::vector<int>& human_actions() const { return human_; }
  const std::vector<int>& robot_actions() const { return robot_; }
  /// Position of an action within its actor's list (the MDP action index
  /// for robot actions, the observation index for human actions).
  int actor_index(int id) const { return actor_index_.at(static_cast<std::size_t>(id)); }

  bool operator==(const ActionAlphabet& other) const { return actions_ == other.actions_; }

 private:
  std::vector<Action> actions_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> human_;
  std::vector<int> robot_;
  std::vector<int> actor_index_;
};

nlohmann::json to_json(const ActionAlphabet& alphabet);
ActionAlphabet alphabet_from_json(const nlohmann::json& j);

}  // namespace hrc
