#include "hrc/place_drill.hpp"

namespace hrc::place_drill {

Board decode(int step) {
  Board b{};
  for (int s = 0; s < kScrews; ++s) {
    b[static_cast<std::size_t>(s)] = static_cast<Screw>(step % 3);
    step /= 3;
  }
  return b;
}

int encode(const Board& board) {
  int step = 0;
  for (int s = kScrews - 1; s >= 0; --s) step = step * 3 + static_cast<int>(board[static_cast<std::size_t>(s)]);
  return step;
}

std::string step_label(int step) {
  static constexpr char kLetters[] = {'u', 'p', 'd'};
  std::string out;
  for (auto s : decode(step)) out.push_back(kLetters[static_cast<int>(s)]);
  return out;
}

ActionAlphabet make_alphabet() {
  return ActionAlphabet({{0, "place-A", Actor::human},
                         {1, "place-B", Actor::human},
                         {2, "place-C", Actor::human},
                         {3, "wait", Actor::human},
                         {4, "drill-A", Actor::robot},
                         {5, "drill-B", Actor::robot},
                         {6, "drill-C", Actor::robot},
                         {7, "no-op", Actor::robot}});
}

Board apply_robot(Board board, int robot_action) {
  if (robot_action >= kDrillA && robot_action < kDrillA + kScrews) {
    auto& s = board[static_cast<std::size_t>(robot_action - kDrillA)];
    if (s == Screw::placed) s = Screw::drilled;
  }
  return board;
}

bool all_placed(const Board& board) {
  for (auto s : board)
    if (s == Screw::unplaced) return false;
  return true;
}

TaskDomain make_domain(double discount) {
  TaskDomain d;
  d.name = "place-drill";
  d.alphabet = make_alphabet();
  for (int x = 0; x < kSteps; ++x) d.steps.push_back(step_label(x));
  d.initial = encode({Screw::unplaced, Screw::unplaced, Screw::unplaced});
  d.terminal = {encode({Screw::drilled, Screw::drilled, Screw::drilled})};
  d.idle_action = kNoOp;
  d.discount = discount;

  const std::string tag(kAnyType);
  for (int x = 0; x < kSteps; ++x) {
    for (int a : d.alphabet.robot_actions()) {
      auto& row = d.response_row(tag, x, a);
      if (d.is_terminal(x)) {
        row.push_back({kWait, x, 1.0});
        continue;
      }
      Board mid = apply_robot(decode(x), a);
      std::vector<Outcome> outs;
      for (int s = 0; s < kScrews; ++s) {
        if (mid[static_cast<std::size_t>(s)] != Screw::unplaced) continue;
        Board next = mid;
        next[static_cast<std::size_t>(s)] = Screw::placed;
        outs.push_back({place(s), encode(next), 0.0});
      }
      outs.push_back({kWait, encode(mid), 0.0});
      for (auto& o : outs) o.prob = 1.0 / static_cast<double>(outs.size());
      row = std::move(outs);
    }
  }
  return d;
}

double true_reward(Preference pref, int step, int robot_action) {
  const Board board = decode(step);
  double r = -1.0;
  const bool is_drill = robot_action >= kDrillA && robot_action < kDrillA + kScrews;
  const bool effective = is_drill && board[static_cast<std::size_t>(robot_action - kDrillA)] == Screw::placed;
  bool waiting = false;
  for (auto s : board) waiting = waiting || s == Screw::placed;
  if (pref == Preference::safe) {
    if (effective && !all_placed(board)) r -= 4.0;
  } else {
    if (!effective && waiting) r -= 2.0;
  }
  return r;
}

}  // namespace hrc::place_drill
