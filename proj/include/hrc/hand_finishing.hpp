#pragma once

#include <json.hpp>

#include "hrc/gaussian_obs.hpp"
#include "hrc/momdp.hpp"

namespace hrc::hand_finishing {

/// Box pose on a lattice: horizontal position, height and tilt. Type 0
/// wants the left side finished first (box moved left and tilted one way),
/// type 1 the right side. The hand position is the only evidence of type.
struct Config {
  int positions = 10;
  int heights = 10;
  int tilts = 10;
  int start_position = 5;
  int start_height = 5;
  int start_tilt = 5;
  int left_max_position = 2;
  int left_tilt = 3;
  int right_min_position = 8;
  int right_tilt = 7;
  double move_cost = -1.0;
  double wait_cost = -0.1;
  double goal_reward = 20.0;
  double discount = 0.95;
  GaussianObsModel hands{10, 10, {{3.0, 5.0}, {7.0, 5.0}}, {{4.0, 0.0, 0.0, 4.0}, {4.0, 0.0, 0.0, 4.0}}};
};

enum Action { left = 0, right, down, up, tilt_down, tilt_up, wait };
inline constexpr int kActions = 7;

int encode(const Config& c, int position, int height, int tilt);
/// Goal reached by a task-step: 0 left, 1 right, -1 none.
int goal_of(const Config& c, int x);

/// |X| = positions · heights · tilts, |Y| = 2, Ω = hand cells.
Momdp make_momdp(const Config& c = {});

nlohmann::json to_json(const Config& c);
Config config_from_json(const nlohmann::json& j);

}  // namespace hrc::hand_finishing
