#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hrc/momdp.hpp"

namespace hrc {

struct AlphaVector {
  int action = 0;
  std::vector<double> values;  // one entry per type
  bool operator==(const AlphaVector&) const = default;
};

/// Piecewise-linear value over the type simplex at every task-step.
struct PolicyValue {
  std::vector<std::vector<AlphaVector>> alphas;  // indexed by x
  int sweeps = 0;
  double residual = 0.0;
  bool converged = false;
  std::size_t belief_points = 0;
  /// Value at the initial belief after every sweep.
  std::vector<double> initial_values;
};

struct SolverOptions {
  int n_points = 1000;
  double residual_tol = 1e-4;
  int max_sweeps = 500;
  std::uint64_t seed = 0;
  /// Longest forward-simulated trajectory used to collect beliefs.
  int max_depth = 100;
};

/// A task-step and a type belief.
struct BeliefPoint {
  int x = 0;
  Belief b;
};

/// Point-based value iteration over beliefs reachable from the initial
/// belief, plus the corner beliefs of every task-step. Backups keep the
/// union of old and new vectors pruned to those maximal at some point, so
/// the value at every point never decreases between sweeps.
PolicyValue solve_point_based(const Momdp& m, const SolverOptions& options = {});

/// The belief set the solver would sample for `m` (exposed for tests).
std::vector<BeliefPoint> sample_beliefs(const Momdp& m, const PolicyValue& current, const SolverOptions& options,
                                        std::size_t count);

double value_at(const PolicyValue& pv, int x, const Belief& b);
/// Action of the maximizing vector; ties within 1e-12 go to the lowest action.
int best_action(const PolicyValue& pv, int x, const Belief& b);

nlohmann::json to_json(const PolicyValue& pv);
PolicyValue policy_value_from_json(const nlohmann::json& j);

}  // namespace hrc
