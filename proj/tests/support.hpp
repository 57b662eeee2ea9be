#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hrc/mdp.hpp"
#include "hrc/momdp.hpp"
#include "hrc/pipeline.hpp"
#include "hrc/place_drill.hpp"
#include "hrc/random.hpp"
#include "hrc/synthetic.hpp"

namespace hrc::test {

inline std::vector<double> random_simplex(Rng& rng, int n, double sparsity = 0.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : v) {
    x = uniform01(rng) < sparsity ? 0.0 : 0.05 + uniform01(rng);
    total += x;
  }
  if (total == 0.0) {
    v[static_cast<std::size_t>(uniform_index(rng, n))] = 1.0;
    return v;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline SparseRow to_sparse(const std::vector<double>& dense) {
  SparseRow row;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] > 0.0) row.emplace_back(static_cast<int>(i), dense[i]);
  return row;
}

// Unconstrained random model: dense type dynamics and type-dependent
// observations, one observation row per (x', a, y').
inline Momdp random_momdp(Rng& rng, int X, int Y, int A, int O) {
  Momdp m;
  m.num_x = X;
  m.num_y = Y;
  m.num_actions = A;
  m.num_obs = O;
  m.discount = 0.9;
  for (int x = 0; x < X; ++x) m.x_labels.push_back("x" + std::to_string(x));
  for (int a = 0; a < A; ++a) m.action_labels.push_back("a" + std::to_string(a));
  for (int o = 0; o < O; ++o) m.obs_labels.push_back("o" + std::to_string(o));
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y)
      for (int a = 0; a < A; ++a) m.tx.push_back(to_sparse(random_simplex(rng, X, 0.5)));
  for (int x = 0; x < X; ++x)
    for (int a = 0; a < A; ++a)
      for (int x2 = 0; x2 < X; ++x2)
        for (int y = 0; y < Y; ++y) m.ty.push_back(random_simplex(rng, Y, 0.3));
  for (int x2 = 0; x2 < X; ++x2)
    for (int a = 0; a < A; ++a)
      for (int y2 = 0; y2 < Y; ++y2) {
        m.obs_index.push_back(static_cast<int>(m.obs_rows.size()));
        m.obs_rows.push_back(random_simplex(rng, O, 0.3));
      }
  for (int i = 0; i < X * Y * A; ++i) m.reward.push_back(2.0 * uniform01(rng) - 1.0);
  m.terminal.assign(static_cast<std::size_t>(X), false);
  m.initial_belief = uniform_belief(Y);
  return m;
}

// Layered finite task: every path reaches the terminal step within
// `layers.size() - 1` turns. Types are static; observations depend on type.
inline Momdp layered_momdp(Rng& rng, const std::vector<int>& layers, int A, int O) {
  const int Y = 2;
  std::vector<int> first;
  int X = 0;
  for (int n : layers) {
    first.push_back(X);
    X += n;
  }
  Momdp m;
  m.num_x = X;
  m.num_y = Y;
  m.num_actions = A;
  m.num_obs = O;
  m.discount = 0.95;
  for (int x = 0; x < X; ++x) m.x_labels.push_back("x" + std::to_string(x));
  for (int a = 0; a < A; ++a) m.action_labels.push_back("a" + std::to_string(a));
  for (int o = 0; o < O; ++o) m.obs_labels.push_back("o" + std::to_string(o));
  m.tx.resize(static_cast<std::size_t>(X * Y * A));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (int i = 0; i < layers[l]; ++i) {
      const int x = first[l] + i;
      for (int y = 0; y < Y; ++y)
        for (int a = 0; a < A; ++a) {
          auto& row = m.tx[(static_cast<std::size_t>(x) * Y + y) * A + a];
          if (l + 1 == layers.size()) {
            row = {{x, 1.0}};
            continue;
          }
          const auto p = random_simplex(rng, layers[l + 1], 0.4);
          for (int j = 0; j < layers[l + 1]; ++j)
            if (p[static_cast<std::size_t>(j)] > 0.0) row.emplace_back(first[l + 1] + j, p[static_cast<std::size_t>(j)]);
        }
    }
  }
  for (int x2 = 0; x2 < X; ++x2)
    for (int a = 0; a < A; ++a)
      for (int y2 = 0; y2 < Y; ++y2) {
        m.obs_index.push_back(static_cast<int>(m.obs_rows.size()));
        m.obs_rows.push_back(random_simplex(rng, O));
      }
  m.terminal.assign(static_cast<std::size_t>(X), false);
  for (int i = 0; i < layers.back(); ++i) m.terminal[static_cast<std::size_t>(first.back() + i)] = true;
  for (int x = 0; x < X; ++x)
    for (int i = 0; i < Y * A; ++i) m.reward.push_back(m.is_terminal(x) ? 0.0 : 0.2 + uniform01(rng));
  m.initial_x = 0;
  m.initial_belief = {0.5, 0.5};
  return m;
}

// n×n grid with deterministic moves (up, down, left, right); walls keep the
// agent in place. The goal cell is absorbing.
inline Mdp gridworld(int n, int goal, double discount = 0.9) {
  Mdp m;
  m.num_states = n * n;
  m.num_actions = 4;
  m.discount = discount;
  m.terminal.assign(static_cast<std::size_t>(n * n), false);
  m.terminal[static_cast<std::size_t>(goal)] = true;
  m.transitions.resize(static_cast<std::size_t>(n * n));
  constexpr int dr[] = {-1, 1, 0, 0};
  constexpr int dc[] = {0, 0, -1, 1};
  for (int s = 0; s < n * n; ++s)
    for (int a = 0; a < 4; ++a) {
      int r = s / n + dr[a], c = s % n + dc[a];
      const int t = s == goal || r < 0 || r >= n || c < 0 || c >= n ? s : r * n + c;
      m.transitions[static_cast<std::size_t>(s)].push_back({{t, 1.0}});
    }
  return m;
}

// Follows a deterministic policy from `s`; true when `goal` is reached
// within `limit` steps.
inline bool reaches(const Mdp& m, const std::vector<int>& policy, int s, int goal, int limit = 100) {
  for (int t = 0; t < limit; ++t) {
    if (s == goal) return true;
    s = m.row(s, policy[static_cast<std::size_t>(s)]).front().first;
  }
  return s == goal;
}

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

inline const synthetic::LabeledCorpus& place_drill_corpus() {
  static const auto corpus = synthetic::place_drill_corpus({}, 11);
  return corpus;
}

// Trained once per process; training is deterministic.
inline const TrainedBundle& place_drill_bundle() {
  static const TrainedBundle bundle = [] {
    TrainConfig config;
    config.k_max = 4;
    config.restarts = 10;
    config.seed = 5;
    config.solver.seed = 5;
    return train(place_drill_corpus().demos, place_drill::make_domain(), config);
  }();
  return bundle;
}

}  // namespace hrc::test
