#include "hrc/momdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hrc/errors.hpp"

namespace hrc {

nlohmann::json to_json(const RewardSpec& r) {
  nlohmann::json j{{"features", to_json(r.phi)}, {"weights", r.weights}, {"report", r.report}};
  if (!r.action_costs.empty()) j["action_costs"] = r.action_costs;
  return j;
}

RewardSpec reward_spec_from_json(const nlohmann::json& j) {
  try {
    RewardSpec r;
    r.phi = feature_map_from_json(j.at("features"));
    r.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("action_costs")) r.action_costs = j.at("action_costs").get<ActionCosts>();
    r.report = j.value("report", nlohmann::json::object());
    if (static_cast<int>(r.weights.size()) != r.phi.dimension)
      throw ParseError("rewards", "weight length differs from feature dimension");
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("rewards", ex.what());
  }
}

nlohmann::json rewards_to_json(const std::vector<RewardSpec>& rewards) {
  auto types = nlohmann::json::array();
  for (const auto& r : rewards) types.push_back(to_json(r));
  return {{"types", types}};
}

std::vector<RewardSpec> rewards_from_json(const nlohmann::json& j) {
  std::vector<RewardSpec> out;
  try {
    for (const auto& t : j.at("types")) out.push_back(reward_spec_from_json(t));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("rewards", ex.what());
  }
  return out;
}

double Momdp::tx_prob(int x, int y, int a, int x2) const {
  for (auto [t, p] : tx_row(x, y, a))
    if (t == x2) return p;
  return 0.0;
}

double Momdp::ty_prob(int x, int y, int a, int x2, int y2) const {
  if (ty.empty()) return y == y2 ? 1.0 : 0.0;
  const auto idx = ((static_cast<std::size_t>(x) * num_actions + a) * num_x + x2) * num_y + y;
  return ty[idx][static_cast<std::size_t>(y2)];
}

bool Momdp::obs_type_independent(int x2, int a) const {
  const int first = obs_row_id(x2, a, 0);
  for (int y = 1; y < num_y; ++y)
    if (obs_row_id(x2, a, y) != first) return false;
  return true;
}

std::vector<std::string> validate_momdp(const Momdp& m) {
  std::vector<std::string> out;
  auto check_row = [&](const std::vector<double>& row, const std::string& what) {
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) out.push_back(what + ": negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) out.push_back(what + ": sums to " + std::to_string(sum));
  };
  const auto xya = static_cast<std::size_t>(m.num_x) * m.num_y * m.num_actions;
  if (m.num_x < 1 || m.num_y < 1 || m.num_actions < 1 || m.num_obs < 1) out.push_back("empty dimension");
  if (m.tx.size() != xya) out.push_back("T_x has wrong size");
  if (m.reward.size() != xya) out.push_back("R has wrong size");
  if (m.terminal.size() != static_cast<std::size_t>(m.num_x)) out.push_back("terminal flags have wrong size");
  if (m.obs_index.size() != static_cast<std::size_t>(m.num_x) * m.num_actions * m.num_y)
    out.push_back("O index has wrong size");
  if (!m.ty.empty() && m.ty.size() != static_cast<std::size_t>(m.num_x) * m.num_actions * m.num_x * m.num_y)
    out.push_back("T_y has wrong size");
  if (m.discount <= 0.0 || m.discount >= 1.0) out.push_back("discount must lie in (0, 1)");
  if (!out.empty()) return out;

  for (int x = 0; x < m.num_x; ++x)
    for (int y = 0; y < m.num_y; ++y)
      for (int a = 0; a < m.num_actions; ++a) {
        const std::string where = "x=" + std::to_string(x) + " y=" + std::to_string(y) + " a=" + std::to_string(a);
        double sum = 0.0;
        for (auto [t, p] : m.tx_row(x, y, a)) {
          if (t < 0 || t >= m.num_x || p < 0.0) out.push_back("T_x " + where + ": invalid entry");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) out.push_back("T_x " + where + ": sums to " + std::to_string(sum));
        if (!std::isfinite(m.r(x, y, a))) out.push_back("R " + where + ": not finite");
        if (m.is_terminal(x) && m.tx_prob(x, y, a, x) != 1.0) out.push_back("terminal " + where + ": not absorbing");
      }
  for (std::size_t i = 0; i < m.ty.size(); ++i) {
    if (m.ty[i].size() != static_cast<std::size_t>(m.num_y)) out.push_back("T_y row " + std::to_string(i) + ": wrong length");
    else check_row(m.ty[i], "T_y row " + std::to_string(i));
  }
  for (std::size_t i = 0; i < m.obs_rows.size(); ++i) {
    if (m.obs_rows[i].size() != static_cast<std::size_t>(m.num_obs)) out.push_back("O row " + std::to_string(i) + ": wrong length");
    else check_row(m.obs_rows[i], "O row " + std::to_string(i));
  }
  for (int id : m.obs_index)
    if (id < 0 || static_cast<std::size_t>(id) >= m.obs_rows.size()) {
      out.push_back("O index out of range");
      break;
    }
  if (m.initial_x < 0 || m.initial_x >= m.num_x) out.push_back("initial task-step out of range");
  if (m.initial_belief.size() != static_cast<std::size_t>(m.num_y)) out.push_back("initial belief has wrong length");
  else check_row(m.initial_belief, "initial belief");
  return out;
}

Belief uniform_belief(int num_y) { return Belief(static_cast<std::size_t>(num_y), 1.0 / num_y); }

Belief belief_update(const Momdp& m, const Belief& b, int x, int a, int x2, int o) {
  Belief out(static_cast<std::size_t>(m.num_y), 0.0);
  std::vector<double> pred(static_cast<std::size_t>(m.num_y));
  for (int y = 0; y < m.num_y; ++y) pred[static_cast<std::size_t>(y)] = m.tx_prob(x, y, a, x2) * b[static_cast<std::size_t>(y)];
  double total = 0.0;
  for (int y2 = 0; y2 < m.num_y; ++y2) {
    double s = 0.0;
    for (int y = 0; y < m.num_y; ++y)
      if (pred[static_cast<std::size_t>(y)] != 0.0) s += pred[static_cast<std::size_t>(y)] * m.ty_prob(x, y, a, x2, y2);
    out[static_cast<std::size_t>(y2)] = m.obs_prob(x2, a, y2, o) * s;
    total += out[static_cast<std::size_t>(y2)];
  }
  if (!(total > 0.0))
    throw ImpossibleObservation("observation " + std::to_string(o) + " after action " + std::to_string(a) +
                                " from task-step " + std::to_string(x) + " to " + std::to_string(x2) +
                                " has zero probability under every type");
  for (double& v : out) v /= total;
  return out;
}

int observation_of(const TaskDomain& domain, int human_action) { return domain.alphabet.actor_index(human_action); }

Momdp assemble_momdp(const TaskDomain& d, int k, const std::vector<RewardSpec>& rewards, const Belief& initial_belief) {
  if (k < 1) throw Error("assemble: need at least one type");
  if (static_cast<int>(rewards.size()) != k)
    throw Error("assemble: expected " + std::to_string(k) + " reward specs, got " + std::to_string(rewards.size()));
  for (int y = 0; y < k; ++y)
    if (!d.has_tag(type_tag(y)))
      throw Error("assemble: domain '" + d.name + "' has no human response for type " + type_tag(y));

  Momdp m;
  m.num_x = d.num_steps();
  m.num_y = k;
  m.num_actions = d.num_robot_actions();
  m.num_obs = static_cast<int>(d.alphabet.human_actions().size());
  m.discount = d.discount;
  m.x_labels = d.steps;
  for (int a : d.alphabet.robot_actions()) m.action_labels.push_back(d.alphabet.label(a));
  for (int h : d.alphabet.human_actions()) m.obs_labels.push_back(d.alphabet.label(h));
  m.initial_x = d.initial;
  m.initial_belief = initial_belief.empty() ? uniform_belief(k) : initial_belief;
  m.terminal.assign(static_cast<std::size_t>(m.num_x), false);
  for (int t : d.terminal) m.terminal[static_cast<std::size_t>(t)] = true;
  m.obs_rows = {std::vector<double>(static_cast<std::size_t>(m.num_obs), 1.0 / m.num_obs)};
  m.obs_index.assign(static_cast<std::size_t>(m.num_x) * m.num_actions * m.num_y, 0);

  const auto xya = static_cast<std::size_t>(m.num_x) * m.num_y * m.num_actions;
  m.tx.resize(xya);
  m.reward.assign(xya, 0.0);
  for (int y = 0; y < k; ++y) {
    const auto& spec = rewards[static_cast<std::size_t>(y)];
    if (static_cast<int>(spec.phi.features.size()) != m.num_x)
      throw Error("assemble: reward for type " + type_tag(y) + " does not cover every task-step");
    const auto r = spec.state_reward();
    const Mdp mdp = reduce_to_mdp(d, type_tag(y));
    for (int x = 0; x < m.num_x; ++x)
      for (int a = 0; a < m.num_actions; ++a) {
        const auto idx = (static_cast<std::size_t>(x) * k + y) * m.num_actions + a;
        m.tx[idx] = mdp.row(x, a);
        if (m.is_terminal(x)) continue;
        double v = r[static_cast<std::size_t>(x)];
        if (!spec.action_costs.empty()) v += spec.action_costs[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
        for (auto [t, p] : m.tx[idx])
          if (m.is_terminal(t)) v += m.discount * p * r[static_cast<std::size_t>(t)];
        m.reward[idx] = v;
      }
  }
  return m;
}

nlohmann::json to_json(const Momdp& m) {
  auto tx = nlohmann::json::array();
  for (const auto& row : m.tx) {
    auto r = nlohmann::json::array();
    for (auto [t, p] : row) r.push_back({t, p});
    tx.push_back(std::move(r));
  }
  std::vector<int> terminal;
  for (int x = 0; x < m.num_x; ++x)
    if (m.is_terminal(x)) terminal.push_back(x);
  return {{"num_x", m.num_x},
          {"num_y", m.num_y},
          {"num_actions", m.num_actions},
          {"num_obs", m.num_obs},
          {"discount", m.discount},
          {"x_labels", m.x_labels},
          {"action_labels", m.action_labels},
          {"obs_labels", m.obs_labels},
          {"tx", std::move(tx)},
          {"ty", m.ty},
          {"obs_rows", m.obs_rows},
          {"obs_index", m.obs_index},
          {"reward", m.reward},
          {"terminal", terminal},
          {"initial_x", m.initial_x},
          {"initial_belief", m.initial_belief}};
}

Momdp momdp_from_json(const nlohmann::json& j) {
  try {
    Momdp m;
    m.num_x = j.at("num_x").get<int>();
    m.num_y = j.at("num_y").get<int>();
    m.num_actions = j.at("num_actions").get<int>();
    m.num_obs = j.at("num_obs").get<int>();
    m.discount = j.at("discount").get<double>();
    m.x_labels = j.value("x_labels", std::vector<std::string>{});
    m.action_labels = j.value("action_labels", std::vector<std::string>{});
    m.obs_labels = j.value("obs_labels", std::vector<std::string>{});
    for (const auto& row : j.at("tx")) {
      SparseRow r;
      for (const auto& e : row) r.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
      m.tx.push_back(std::move(r));
    }
    m.ty = j.value("ty", std::vector<std::vector<double>>{});
    m.obs_rows = j.at("obs_rows").get<std::vector<std::vector<double>>>();
    m.obs_index = j.at("obs_index").get<std::vector<int>>();
    m.reward = j.at("reward").get<std::vector<double>>();
    m.terminal.assign(static_cast<std::size_t>(m.num_x), false);
    for (int t : j.at("terminal").get<std::vector<int>>()) {
      if (t < 0 || t >= m.num_x) throw ParseError("momdp", "terminal task-step out of range");
      m.terminal[static_cast<std::size_t>(t)] = true;
    }
    m.initial_x = j.at("initial_x").get<int>();
    m.initial_belief = j.at("initial_belief").get<std::vector<double>>();
    auto problems = validate_momdp(m);
    if (!problems.empty()) throw ParseError("momdp", problems.front());
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("momdp", ex.what());
  }
}

}  // namespace hrc
