#include "hrc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hrc/errors.hpp"

namespace hrc {

namespace {

constexpr double kRowTolerance = 1e-9;
constexpr double kLoadTolerance = 1e-6;

std::size_t row_index(const TaskDomain& d, int step, int robot_action) {
  return static_cast<std::size_t>(step) * static_cast<std::size_t>(d.num_robot_actions()) +
         static_cast<std::size_t>(d.alphabet.actor_index(robot_action));
}

const std::vector<Outcome> kEmptyRow;

}  // namespace

std::string type_tag(int type) { return std::to_string(type); }

bool TaskDomain::is_terminal(int step) const { return std::binary_search(terminal.begin(), terminal.end(), step); }

std::optional<int> TaskDomain::find_step(std::string_view label) const {
  auto it = std::find(steps.begin(), steps.end(), label);
  if (it == steps.end()) return std::nullopt;
  return static_cast<int>(it - steps.begin());
}

int TaskDomain::step_id(std::string_view label) const {
  if (auto s = find_step(label)) return *s;
  throw Error("unknown task-step '" + std::string(label) + "'");
}

const std::vector<Outcome>& TaskDomain::response(const std::string& tag, int step, int robot_action) const {
  auto it = responses.find(tag);
  if (it == responses.end()) throw NotFound("domain has no human response tagged '" + tag + "'");
  auto idx = row_index(*this, step, robot_action);
  if (idx >= it->second.size()) return kEmptyRow;
  return it->second[idx];
}

std::vector<Outcome>& TaskDomain::response_row(const std::string& tag, int step, int robot_action) {
  auto& table = responses[tag];
  table.resize(static_cast<std::size_t>(num_steps()) * static_cast<std::size_t>(num_robot_actions()));
  return table[row_index(*this, step, robot_action)];
}

std::vector<std::string> validate_domain(const TaskDomain& d) {
  std::vector<std::string> out;
  const int n = d.num_steps();
  if (n == 0) out.push_back("domain has no task-steps");
  if (d.initial < 0 || d.initial >= n) out.push_back("initial step out of range");
  for (int t : d.terminal)
    if (t < 0 || t >= n) out.push_back("terminal step " + std::to_string(t) + " out of range");
  if (!(d.discount > 0.0 && d.discount < 1.0)) out.push_back("discount must lie in (0,1)");
  if (d.idle_action && (*d.idle_action < 0 || *d.idle_action >= d.alphabet.size() ||
                        !d.alphabet.is_robot(*d.idle_action)))
    out.push_back("idle action must be a robot action");
  if (d.responses.empty()) out.push_back("domain defines no human responses");

  for (const auto& [tag, table] : d.responses) {
    for (int x = 0; x < n; ++x) {
      for (int a : d.alphabet.robot_actions()) {
        const auto& row = d.response(tag, x, a);
        std::ostringstream where;
        where << "response[" << tag << "] at step '" << d.steps[static_cast<std::size_t>(x)] << "', robot action '"
              << d.alphabet.label(a) << "'";
        if (row.empty()) {
          if (!d.is_terminal(x)) out.push_back(where.str() + ": missing row");
          continue;
        }
        double sum = 0.0;
        bool bad_entry = false;
        for (const auto& o : row) {
          sum += o.prob;
          if (o.prob < 0.0 || o.human_action < 0 || o.human_action >= d.alphabet.size() ||
              !d.alphabet.is_human(o.human_action) || o.next_step < 0 || o.next_step >= n)
            bad_entry = true;
          if (d.is_terminal(x) && o.next_step != x && o.prob > 0.0) {
            out.push_back(where.str() + ": terminal step has an outgoing transition");
            bad_entry = false;
            break;
          }
        }
        if (bad_entry) out.push_back(where.str() + ": invalid outcome entry");
        if (std::abs(sum - 1.0) > kRowTolerance) {
          std::ostringstream msg;
          msg.precision(12);
          msg << where.str() << ": probabilities sum to " << sum;
          out.push_back(msg.str());
        }
      }
    }
  }
  return out;
}

TaskDomain domain_from_json(const nlohmann::json& j, const std::string& origin) {
  TaskDomain d;
  try {
    d.name = j.value("name", std::string{});
    d.alphabet = alphabet_from_json(j.at("alphabet"));
    d.steps = j.at("task_steps").get<std::vector<std::string>>();
    std::set<std::string> seen;
    for (const auto& s : d.steps)
      if (!seen.insert(s).second) throw ParseError(origin + ": task_steps", "duplicate label '" + s + "'");
    d.initial = d.step_id(j.at("initial").get<std::string>());
    for (const auto& t : j.at("terminal")) d.terminal.push_back(d.step_id(t.get<std::string>()));
    std::sort(d.terminal.begin(), d.terminal.end());
    d.terminal.erase(std::unique(d.terminal.begin(), d.terminal.end()), d.terminal.end());
    if (j.contains("idle_action") && !j.at("idle_action").is_null())
      d.idle_action = d.alphabet.id_of(j.at("idle_action").get<std::string>());
    d.discount = j.value("discount", 0.95);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(origin, ex.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& ex) {
    throw ParseError(origin, ex.what());
  }

  const auto& rows = j.at("responses");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = origin + ": responses[" + std::to_string(i) + "]";
    try {
      const auto& r = rows[i];
      const std::string tag = r.value("tag", std::string(kAnyType));
      int step = d.step_id(r.at("step").get<std::string>());
      int robot = d.alphabet.id_of(r.at("robot").get<std::string>());
      if (!d.alphabet.is_robot(robot)) throw Error("'" + d.alphabet.label(robot) + "' is not a robot action");
      auto& row = d.response_row(tag, step, robot);
      if (!row.empty()) throw Error("duplicate row");
      double sum = 0.0;
      for (const auto& o : r.at("outcomes")) {
        Outcome out;
        out.human_action = d.alphabet.id_of(o.at("human").get<std::string>());
        out.next_step = d.step_id(o.at("next").get<std::string>());
        out.prob = o.at("p").get<double>();
        if (!d.alphabet.is_human(out.human_action))
          throw Error("'" + d.alphabet.label(out.human_action) + "' is not a human action");
        if (out.prob < 0.0 || !std::isfinite(out.prob)) throw Error("invalid probability");
        sum += out.prob;
        row.push_back(out);
      }
      if (std::abs(sum - 1.0) > kLoadTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "probabilities sum to " << sum << " (tolerance " << kLoadTolerance << ")";
        throw Error(msg.str());
      }
      // Rows already normalized load bit-exact so saved bundles round-trip.
      if (std::abs(sum - 1.0) > kRowTolerance)
        for (auto& o : row) o.prob /= sum;
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(where, ex.what());
    } catch (const Error& ex) {
      throw ParseError(where, ex.what());
    }
  }
  return d;
}

TaskDomain load_domain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open domain file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + " (byte " + std::to_string(ex.byte) + ")", ex.what());
  }
  return domain_from_json(j, path.string());
}

nlohmann::json to_json(const TaskDomain& d) {
  nlohmann::json j;
  j["name"] = d.name;
  j["alphabet"] = to_json(d.alphabet);
  j["task_steps"] = d.steps;
  j["initial"] = d.steps.at(static_cast<std::size_t>(d.initial));
  auto term = nlohmann::json::array();
  for (int t : d.terminal) term.push_back(d.steps.at(static_cast<std::size_t>(t)));
  j["terminal"] = term;
  j["idle_action"] = d.idle_action ? nlohmann::json(d.alphabet.label(*d.idle_action)) : nlohmann::json(nullptr);
  auto rows = nlohmann::json::array();
  for (const auto& [tag, table] : d.responses) {
    for (int x = 0; x < d.num_steps(); ++x) {
      for (int a : d.alphabet.robot_actions()) {
        const auto& row = d.response(tag, x, a);
        if (row.empty()) continue;
        auto outs = nlohmann::json::array();
        for (const auto& o : row)
          outs.push_back({{"human", d.alphabet.label(o.human_action)},
                          {"next", d.steps[static_cast<std::size_t>(o.next_step)]},
                          {"p", o.prob}});
        rows.push_back({{"tag", tag},
                        {"step", d.steps[static_cast<std::size_t>(x)]},
                        {"robot", d.alphabet.label(a)},
                        {"outcomes", std::move(outs)}});
      }
    }
  }
  j["responses"] = std::move(rows);
  j["discount"] = d.discount;
  return j;
}

void save_domain(const TaskDomain& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(d).dump(2) << '\n';
}

std::vector<int> legal_human_actions(const TaskDomain& d, int step, int robot_action) {
  std::set<int> legal;
  for (const auto& [tag, table] : d.responses)
    for (const auto& o : d.response(tag, step, robot_action))
      if (o.prob > 0.0) legal.insert(o.human_action);
  return {legal.begin(), legal.end()};
}

std::optional<int> resolve_turn(const TaskDomain& d, int step, int robot_action, int human_action) {
  std::optional<int> next;
  for (const auto& [tag, table] : d.responses) {
    for (const auto& o : d.response(tag, step, robot_action)) {
      if (o.human_action != human_action || o.prob <= 0.0) continue;
      if (next && *next != o.next_step)
        throw Error("ambiguous turn: '" + d.alphabet.label(human_action) + "' after '" +
                    d.alphabet.label(robot_action) + "' at step '" + d.steps[static_cast<std::size_t>(step)] +
                    "' leads to more than one task-step");
      next = o.next_step;
    }
  }
  return next;
}

std::vector<int> replay_states(const TaskDomain& d, const DemoSequence& seq) {
  validate_sequence(seq, d.alphabet);
  const auto& acts = seq.actions;
  int x = d.initial;
  std::vector<int> states{x};
  auto fail = [&](std::size_t index, const std::string& why) {
    throw ValidationError("replay failed at index " + std::to_string(index + 1) + " ('" +
                          d.alphabet.label(acts[index]) + "'): " + why);
  };
  auto advance = [&](int robot, int human, std::size_t human_index) {
    auto next = resolve_turn(d, x, robot, human);
    if (!next)
      fail(human_index, "not a possible response to '" + d.alphabet.label(robot) + "' at step '" +
                            d.steps[static_cast<std::size_t>(x)] + "'");
    x = *next;
    states.push_back(x);
  };

  std::size_t i = 0;
  if (d.alphabet.is_human(acts[0])) {
    if (!d.idle_action) fail(0, "sequence starts with a human action but the domain has no idle action");
    advance(*d.idle_action, acts[0], 0);
    i = 1;
  }
  while (i < acts.size()) {
    if (d.is_terminal(x)) fail(i, "actions continue after a terminal task-step");
    int robot = acts[i];
    if (i + 1 < acts.size()) {
      advance(robot, acts[i + 1], i + 1);
    } else {
      // Trailing robot action: complete the turn only when every possible
      // response lands on the same task-step.
      std::optional<int> only;
      bool unique = true;
      for (const auto& [tag, table] : d.responses)
        for (const auto& o : d.response(tag, x, robot)) {
          if (o.prob <= 0.0) continue;
          if (only && *only != o.next_step) unique = false;
          only = o.next_step;
        }
      if (only && unique) states.push_back(*only);
    }
    i += 2;
  }
  return states;
}

std::vector<std::vector<double>> response_counts(const TaskDomain& d, const std::vector<DemoSequence>& seqs,
                                                 double pseudocount) {
  if (!(pseudocount > 0.0)) throw Error("response pseudo-count must be positive");
  const auto& ab = d.alphabet;
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(d.num_steps()) * ab.robot_actions().size(),
                                          std::vector<double>(ab.human_actions().size(), pseudocount));
  for (const auto& s : seqs) {
    const auto states = replay_states(d, s);
    const auto& a = s.actions;
    std::size_t turn = 0;
    auto count = [&](int robot, int human) {
      counts[row_index(d, states[turn], robot)][static_cast<std::size_t>(ab.actor_index(human))] += 1.0;
      ++turn;
    };
    std::size_t i = 0;
    if (ab.is_human(a[0])) {
      count(*d.idle_action, a[0]);
      i = 1;
    }
    for (; i + 1 < a.size(); i += 2) count(a[i], a[i + 1]);
  }
  return counts;
}

ResponseTable learn_response(const TaskDomain& d, const std::vector<DemoSequence>& seqs, double pseudocount) {
  const std::string base(kAnyType);
  if (!d.has_tag(base)) throw Error("learning a response requires the structural '*' response in the domain");
  auto counts = response_counts(d, seqs, pseudocount);
  ResponseTable table(static_cast<std::size_t>(d.num_steps()) * static_cast<std::size_t>(d.num_robot_actions()));
  for (int x = 0; x < d.num_steps(); ++x) {
    for (int a : d.alphabet.robot_actions()) {
      const auto& row = d.response(base, x, a);
      if (row.empty()) continue;
      std::vector<Outcome> out = row;
      double sum = 0.0;
      for (auto& o : out) {
        o.prob *= counts[row_index(d, x, a)][static_cast<std::size_t>(d.alphabet.actor_index(o.human_action))];
        sum += o.prob;
      }
      for (auto& o : out) o.prob /= sum;
      table[row_index(d, x, a)] = std::move(out);
    }
  }
  return table;
}

TaskDomain with_type_responses(const TaskDomain& domain, const std::vector<std::vector<DemoSequence>>& per_type,
                               double pseudocount) {
  TaskDomain out = domain;
  for (auto it = out.responses.begin(); it != out.responses.end();)
    it = it->first == kAnyType ? std::next(it) : out.responses.erase(it);
  for (std::size_t z = 0; z < per_type.size(); ++z)
    out.responses[type_tag(static_cast<int>(z))] = learn_response(domain, per_type[z], pseudocount);
  return out;
}

}  // namespace hrc
