#include "hrc/alphabet.hpp"

#include "hrc/errors.hpp"

namespace hrc {

std::string_view to_string(Actor actor) { return actor == Actor::human ? "human" : "robot"; }

Actor actor_from_string(std::string_view s) {
  if (s == "human") return Actor::human;
  if (s == "robot") return Actor::robot;
  throw Error("unknown actor '" + std::string(s) + "' (expected human or robot)");
}

ActionAlphabet::ActionAlphabet(std::vector<Action> actions) : actions_(std::move(actions)) {
  if (actions_.size() < 2) throw ValidationError("alphabet needs at least two actions");
  actor_index_.resize(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const auto& a = actions_[i];
    if (a.id != static_cast<int>(i))
      throw ValidationError("alphabet ids must be contiguous from 0; found id " + std::to_string(a.id) +
                            " at position " + std::to_string(i));
    if (a.label.empty()) throw ValidationError("action " + std::to_string(a.id) + " has an empty label");
    if (!index_.emplace(a.label, a.id).second) throw ValidationError("duplicate action label '" + a.label + "'");
    auto& group = a.actor == Actor::human ? human_ : robot_;
    actor_index_[i] = static_cast<int>(group.size());
    group.push_back(a.id);
  }
  if (human_.empty() || robot_.empty())
    throw ValidationError("alphabet needs at least one human and one robot action");
}

std::optional<int> ActionAlphabet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ActionAlphabet::id_of(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw Error("unknown action '" + std::string(label) + "'");
}

nlohmann::json to_json(const ActionAlphabet& alphabet) {
  auto arr = nlohmann::json::array();
  for (const auto& a : alphabet.actions())
    arr.push_back({{"id", a.id}, {"label", a.label}, {"actor", std::string(to_string(a.actor))}});
  return arr;
}

ActionAlphabet alphabet_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("alphabet", "expected an array of actions");
  std::vector<Action> actions;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string where = "alphabet[" + std::to_string(i) + "]";
    try {
      Action a;
      a.id = e.contains("id") ? e.at("id").get<int>() : static_cast<int>(i);
      a.label = e.at("label").get<std::string>();
      a.actor = actor_from_string(e.at("actor").get<std::string>());
      actions.push_back(std::move(a));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(where, ex.what());
    } catch (const Error& ex) {
      throw ParseError(where, ex.what());
    }
  }
  try {
    return ActionAlphabet(std::move(actions));
  } catch (const Error& ex) {
    throw ParseError("alphabet", ex.what());
  }
}

}  // namespace hrc
