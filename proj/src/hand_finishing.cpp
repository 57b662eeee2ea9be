#include "hrc/hand_finishing.hpp"

#include <algorithm>

#include "hrc/errors.hpp"

namespace hrc::hand_finishing {

int encode(const Config& c, int position, int height, int tilt) {
  return (position * c.heights + height) * c.tilts + tilt;
}

int goal_of(const Config& c, int x) {
  const int tilt = x % c.tilts;
  const int position = x / (c.heights * c.tilts);
  if (position <= c.left_max_position && tilt == c.left_tilt) return 0;
  if (position >= c.right_min_position && tilt == c.right_tilt) return 1;
  return -1;
}

Momdp make_momdp(const Config& c) {
  if (c.hands.num_types() != 2) throw ValidationError("hand-finishing needs exactly two hand models");
  Momdp m;
  m.num_x = c.positions * c.heights * c.tilts;
  m.num_y = 2;
  m.num_actions = kActions;
  m.num_obs = c.hands.num_cells();
  m.discount = c.discount;
  m.action_labels = {"left", "right", "down", "up", "tilt-down", "tilt-up", "wait"};
  for (int p = 0; p < c.positions; ++p)
    for (int h = 0; h < c.heights; ++h)
      for (int t = 0; t < c.tilts; ++t)
        m.x_labels.push_back(std::to_string(p) + "," + std::to_string(h) + "," + std::to_string(t));
  for (int j = 0; j < c.hands.height; ++j)
    for (int i = 0; i < c.hands.width; ++i) m.obs_labels.push_back(std::to_string(i) + "," + std::to_string(j));
  m.obs_rows = build_gaussian_obs(c.hands);
  m.obs_index.resize(static_cast<std::size_t>(m.num_x) * m.num_actions * m.num_y);
  for (std::size_t i = 0; i < m.obs_index.size(); ++i) m.obs_index[i] = static_cast<int>(i % 2);
  m.terminal.resize(static_cast<std::size_t>(m.num_x));
  m.tx.resize(static_cast<std::size_t>(m.num_x) * m.num_y * m.num_actions);
  m.reward.assign(m.tx.size(), 0.0);
  for (int p = 0; p < c.positions; ++p)
    for (int h = 0; h < c.heights; ++h)
      for (int t = 0; t < c.tilts; ++t) {
        const int x = encode(c, p, h, t);
        const bool term = goal_of(c, x) >= 0;
        m.terminal[static_cast<std::size_t>(x)] = term;
        for (int a = 0; a < kActions; ++a) {
          int np = p, nh = h, nt = t;
          switch (a) {
            case left: np = std::max(p - 1, 0); break;
            case right: np = std::min(p + 1, c.positions - 1); break;
            case down: nh = std::max(h - 1, 0); break;
            case up: nh = std::min(h + 1, c.heights - 1); break;
            case tilt_down: nt = std::max(t - 1, 0); break;
            case tilt_up: nt = std::min(t + 1, c.tilts - 1); break;
            default: break;
          }
          const int x2 = term ? x : encode(c, np, nh, nt);
          for (int y = 0; y < 2; ++y) {
            const auto idx = (static_cast<std::size_t>(x) * 2 + y) * kActions + a;
            m.tx[idx] = {{x2, 1.0}};
            if (term) continue;
            double r = a == wait ? c.wait_cost : c.move_cost;
            const int g = goal_of(c, x2);
            if (g >= 0) r += m.discount * (g == y ? c.goal_reward : -c.goal_reward);
            m.reward[idx] = r;
          }
        }
      }
  m.initial_x = encode(c, c.start_position, c.start_height, c.start_tilt);
  m.initial_belief = uniform_belief(2);
  return m;
}

nlohmann::json to_json(const Config& c) {
  return {{"positions", c.positions},
          {"heights", c.heights},
          {"tilts", c.tilts},
          {"start", {c.start_position, c.start_height, c.start_tilt}},
          {"left_goal", {{"max_position", c.left_max_position}, {"tilt", c.left_tilt}}},
          {"right_goal", {{"min_position", c.right_min_position}, {"tilt", c.right_tilt}}},
          {"move_cost", c.move_cost},
          {"wait_cost", c.wait_cost},
          {"goal_reward", c.goal_reward},
          {"discount", c.discount},
          {"hands", to_json(c.hands)}};
}

Config config_from_json(const nlohmann::json& j) {
  try {
    Config c;
    c.positions = j.value("positions", c.positions);
    c.heights = j.value("heights", c.heights);
    c.tilts = j.value("tilts", c.tilts);
    if (j.contains("start")) {
      auto s = j.at("start").get<std::vector<int>>();
      if (s.size() != 3) throw ParseError("hand-finishing config", "start needs three coordinates");
      c.start_position = s[0];
      c.start_height = s[1];
      c.start_tilt = s[2];
    }
    if (j.contains("left_goal")) {
      c.left_max_position = j.at("left_goal").at("max_position").get<int>();
      c.left_tilt = j.at("left_goal").at("tilt").get<int>();
    }
    if (j.contains("right_goal")) {
      c.right_min_position = j.at("right_goal").at("min_position").get<int>();
      c.right_tilt = j.at("right_goal").at("tilt").get<int>();
    }
    c.move_cost = j.value("move_cost", c.move_cost);
    c.wait_cost = j.value("wait_cost", c.wait_cost);
    c.goal_reward = j.value("goal_reward", c.goal_reward);
    c.discount = j.value("discount", c.discount);
    if (j.contains("hands")) c.hands = gaussian_obs_from_json(j.at("hands"));
    return c;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("hand-finishing config", ex.what());
  }
}

}  // namespace hrc::hand_finishing
