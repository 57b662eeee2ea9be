#pragma once

#include <array>
#include <string>

#include "hrc/domain.hpp"

namespace hrc::place_drill {

enum class Screw { unplaced = 0, placed = 1, drilled = 2 };

inline constexpr int kScrews = 3;
inline constexpr int kSteps = 27;

// Alphabet ids.
inline constexpr int kPlaceA = 0;
inline constexpr int kWait = 3;
inline constexpr int kDrillA = 4;
inline constexpr int kNoOp = 7;

inline constexpr int place(int screw) { return kPlaceA + screw; }
inline constexpr int drill(int screw) { return kDrillA + screw; }

using Board = std::array<Screw, kScrews>;

Board decode(int step);
int encode(const Board& board);
/// "upd"-style label, one letter per screw A, B, C.
std::string step_label(int step);

ActionAlphabet make_alphabet();

/// The bundled three-screw domain. The structural response ("*") is uniform
/// over the human's legal actions after the robot's move.
TaskDomain make_domain(double discount = 0.95);

/// Applies a robot action; invalid drills leave the board unchanged.
Board apply_robot(Board board, int robot_action);
bool all_placed(const Board& board);

enum class Preference { safe, efficient };

/// Ground-truth per-turn score used to compare policies against a known
/// human preference: -1 per turn, plus -4 for a safe-type human when the
/// robot drills while a screw is unplaced, or -2 for an efficient-type human
/// when the robot idles or misfires while a placed screw waits.
double true_reward(Preference pref, int step, int robot_action);

}  // namespace hrc::place_drill
