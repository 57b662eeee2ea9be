#include "hrc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::size_t argmax_vector(const std::vector<AlphaVector>& set, const Belief& b) {
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    double v = dot(set[i].values, b);
    if (v > best_v + 1e-12 || (v > best_v - 1e-12 && set[i].action < set[best].action)) {
      if (v > best_v) best_v = v;
      best = i;
    }
  }
  return best;
}

// Blind-policy lower bound: every step earns at least min(R, 0).
PolicyValue initial_value(const Momdp& m) {
  double rmin = 0.0;
  for (int x = 0; x < m.num_x; ++x)
    for (int y = 0; y < m.num_y; ++y)
      for (int a = 0; a < m.num_actions; ++a)
        if (!m.is_terminal(x)) rmin = std::min(rmin, m.r(x, y, a));
  PolicyValue pv;
  pv.alphas.resize(static_cast<std::size_t>(m.num_x));
  for (int x = 0; x < m.num_x; ++x) {
    double v = m.is_terminal(x) ? 0.0 : rmin / (1.0 - m.discount);
    pv.alphas[static_cast<std::size_t>(x)] = {AlphaVector{0, std::vector<double>(static_cast<std::size_t>(m.num_y), v)}};
  }
  return pv;
}

struct Successor {
  int x2;
  std::vector<double> tx;  // T_x(x' | x, y, a) per y
};

std::vector<Successor> successors(const Momdp& m, int x, int a) {
  std::vector<Successor> out;
  for (int y = 0; y < m.num_y; ++y)
    for (auto [t, p] : m.tx_row(x, y, a)) {
      auto it = std::find_if(out.begin(), out.end(), [t = t](const Successor& s) { return s.x2 == t; });
      if (it == out.end()) {
        out.push_back({t, std::vector<double>(static_cast<std::size_t>(m.num_y), 0.0)});
        it = std::prev(out.end());
      }
      it->tx[static_cast<std::size_t>(y)] += p;
    }
  return out;
}

// Point-based backup of `b` at task-step `x` against the current vectors.
AlphaVector backup(const Momdp& m, const PolicyValue& pv, int x, const Belief& b) {
  const auto ny = static_cast<std::size_t>(m.num_y);
  AlphaVector best;
  double best_v = -std::numeric_limits<double>::infinity();
  std::vector<double> g(ny);
  for (int a = 0; a < m.num_actions; ++a) {
    AlphaVector alpha{a, std::vector<double>(ny)};
    for (int y = 0; y < m.num_y; ++y) alpha.values[static_cast<std::size_t>(y)] = m.r(x, y, a);
    for (const auto& succ : successors(m, x, a)) {
      const auto& next = pv.alphas[static_cast<std::size_t>(succ.x2)];
      const bool collapse = m.obs_type_independent(succ.x2, a);
      if (m.ty.empty()) {
        // Static type: g_α(y) = T_x(x'|x,y,a) O(o|x',a,y) α(y).
        std::vector<const std::vector<double>*> obs(ny);
        for (int y = 0; y < m.num_y; ++y)
          obs[static_cast<std::size_t>(y)] = &m.obs_rows[static_cast<std::size_t>(m.obs_row_id(succ.x2, a, y))];
        std::vector<double> w(ny), scale(ny);
        for (int o = 0; o < (collapse ? 1 : m.num_obs); ++o) {
          for (std::size_t y = 0; y < ny; ++y) {
            scale[y] = succ.tx[y] * (collapse ? 1.0 : (*obs[y])[static_cast<std::size_t>(o)]);
            w[y] = b[y] * scale[y];
          }
          std::size_t top = 0;
          double top_v = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < next.size(); ++i) {
            double val = dot(w, next[i].values);
            if (val > top_v) {
              top_v = val;
              top = i;
            }
          }
          for (std::size_t y = 0; y < ny; ++y) alpha.values[y] += m.discount * scale[y] * next[top].values[y];
        }
        continue;
      }
      // g_α(y) = Σ_{y'} T_x(x'|x,y,a) T_y(y'|x,y,a,x') O(o|x',a,y') α(y').
      auto fold = [&](const AlphaVector& v, int o, std::vector<double>& out) {
        for (int y = 0; y < m.num_y; ++y) {
          double s = 0.0;
          for (int y2 = 0; y2 < m.num_y; ++y2) {
            double tr = m.ty_prob(x, y, a, succ.x2, y2);
            if (tr == 0.0) continue;
            s += tr * (o < 0 ? 1.0 : m.obs_prob(succ.x2, a, y2, o)) * v.values[static_cast<std::size_t>(y2)];
          }
          out[static_cast<std::size_t>(y)] = succ.tx[static_cast<std::size_t>(y)] * s;
        }
      };
      // An observation that cannot tell types apart only rescales every
      // candidate by the same factor, so one collapsed term suffices.
      for (int o = collapse ? -1 : 0; o < (collapse ? 0 : m.num_obs); ++o) {
        double top = -std::numeric_limits<double>::infinity();
        std::vector<double> chosen(ny);
        for (const auto& v : next) {
          fold(v, o, g);
          double val = dot(g, b);
          if (val > top) {
            top = val;
            chosen = g;
          }
        }
        for (std::size_t y = 0; y < ny; ++y) alpha.values[y] += m.discount * chosen[y];
      }
    }
    double v = dot(alpha.values, b);
    if (v > best_v + 1e-12) {
      best_v = v;
      best = std::move(alpha);
    }
  }
  return best;
}

bool same_belief(const Belief& a, const Belief& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

}  // namespace

double value_at(const PolicyValue& pv, int x, const Belief& b) {
  const auto& set = pv.alphas.at(static_cast<std::size_t>(x));
  return dot(set[argmax_vector(set, b)].values, b);
}

int best_action(const PolicyValue& pv, int x, const Belief& b) {
  const auto& set = pv.alphas.at(static_cast<std::size_t>(x));
  return set[argmax_vector(set, b)].action;
}

std::vector<BeliefPoint> sample_beliefs(const Momdp& m, const PolicyValue& current, const SolverOptions& opt,
                                        std::size_t count) {
  std::vector<BeliefPoint> out;
  auto known = [&](int x, const Belief& b) {
    return std::any_of(out.begin(), out.end(), [&](const BeliefPoint& p) { return p.x == x && same_belief(p.b, b); });
  };
  Rng rng(derive_seed(opt.seed, {0x5a3d1e}));
  std::vector<double> weights;
  // Stop after a long run of trajectories that reach nothing new.
  int idle = 0;
  for (std::size_t episode = 0; out.size() < count && idle < 50; ++episode) {
    const std::size_t before = out.size();
    int x = m.initial_x;
    Belief b = m.initial_belief;
    int y = sample_index(rng, b);
    for (int depth = 0; depth < opt.max_depth && !m.is_terminal(x) && out.size() < count; ++depth) {
      const int a = uniform01(rng) < 0.5 ? best_action(current, x, b) : uniform_index(rng, m.num_actions);
      const auto& row = m.tx_row(x, y, a);
      weights.clear();
      for (auto [_, p] : row) weights.push_back(p);
      const int x2 = row[static_cast<std::size_t>(sample_index(rng, weights))].first;
      int y2 = y;
      if (!m.ty.empty()) {
        weights.assign(static_cast<std::size_t>(m.num_y), 0.0);
        for (int t = 0; t < m.num_y; ++t) weights[static_cast<std::size_t>(t)] = m.ty_prob(x, y, a, x2, t);
        y2 = sample_index(rng, weights);
      }
      const auto& orow = m.obs_rows[static_cast<std::size_t>(m.obs_row_id(x2, a, y2))];
      const int o = sample_index(rng, orow);
      b = belief_update(m, b, x, a, x2, o);
      x = x2;
      y = y2;
      if (!m.is_terminal(x) && !known(x, b)) out.push_back({x, b});
    }
    idle = out.size() > before ? 0 : idle + 1;
  }
  return out;
}

PolicyValue solve_point_based(const Momdp& m, const SolverOptions& opt) {
  if (opt.n_points < m.num_y + 1) throw Error("solver: n_points must exceed the number of types");
  PolicyValue pv = initial_value(m);

  // Points grouped by task-step; corners at every non-terminal step.
  std::vector<std::vector<Belief>> points(static_cast<std::size_t>(m.num_x));
  auto add_point = [&](int x, const Belief& b) {
    auto& set = points[static_cast<std::size_t>(x)];
    if (std::none_of(set.begin(), set.end(), [&](const Belief& p) { return same_belief(p, b); })) set.push_back(b);
  };
  for (int x = 0; x < m.num_x; ++x) {
    if (m.is_terminal(x)) continue;
    for (int y = 0; y < m.num_y; ++y) {
      Belief e(static_cast<std::size_t>(m.num_y), 0.0);
      e[static_cast<std::size_t>(y)] = 1.0;
      add_point(x, e);
    }
  }
  if (!m.is_terminal(m.initial_x)) add_point(m.initial_x, m.initial_belief);

  auto sweep_until_converged = [&](int budget) {
    for (int s = 0; s < budget && pv.sweeps < opt.max_sweeps; ++s) {
      PolicyValue next = pv;
      double change = 0.0;
      for (int x = 0; x < m.num_x; ++x) {
        const auto& bx = points[static_cast<std::size_t>(x)];
        if (bx.empty()) continue;
        auto& set = next.alphas[static_cast<std::size_t>(x)];
        std::vector<double> old_values;
        for (const auto& b : bx) old_values.push_back(value_at(pv, x, b));
        for (const auto& b : bx) set.push_back(backup(m, pv, x, b));
        // Keep only vectors that are maximal at some point of this task-step.
        std::vector<bool> keep(set.size(), false);
        for (std::size_t i = 0; i < bx.size(); ++i) {
          keep[argmax_vector(set, bx[i])] = true;
        }
        std::vector<AlphaVector> pruned;
        for (std::size_t i = 0; i < set.size(); ++i)
          if (keep[i] && std::none_of(pruned.begin(), pruned.end(), [&](const AlphaVector& v) { return v == set[i]; }))
            pruned.push_back(std::move(set[i]));
        set = std::move(pruned);
        for (std::size_t i = 0; i < bx.size(); ++i)
          change = std::max(change, value_at(next, x, bx[i]) - old_values[i]);
      }
      pv.alphas = std::move(next.alphas);
      ++pv.sweeps;
      pv.residual = change;
      pv.initial_values.push_back(value_at(pv, m.initial_x, m.initial_belief));
      if (change <= opt.residual_tol) return true;
    }
    return false;
  };

  std::size_t sampled = 0;
  const auto target = static_cast<std::size_t>(opt.n_points);
  sweep_until_converged(opt.max_sweeps);
  // Grow the belief set from the current policy, then re-converge.
  while (sampled < target && pv.sweeps < opt.max_sweeps) {
    SolverOptions round = opt;
    round.seed = derive_seed(opt.seed, {sampled});
    auto fresh = sample_beliefs(m, pv, round, target - sampled);
    std::size_t added = 0;
    for (const auto& p : fresh) {
      const auto before = points[static_cast<std::size_t>(p.x)].size();
      add_point(p.x, p.b);
      if (points[static_cast<std::size_t>(p.x)].size() > before) ++added;
    }
    if (added == 0) break;
    sampled += added;
    sweep_until_converged(opt.max_sweeps);
  }
  pv.converged = pv.residual <= opt.residual_tol;
  pv.belief_points = 0;
  for (const auto& set : points) pv.belief_points += set.size();
  return pv;
}

nlohmann::json to_json(const PolicyValue& pv) {
  auto steps = nlohmann::json::array();
  for (const auto& set : pv.alphas) {
    auto vs = nlohmann::json::array();
    for (const auto& v : set) vs.push_back({{"action", v.action}, {"alpha", v.values}});
    steps.push_back(std::move(vs));
  }
  return {{"alphas", std::move(steps)},
          {"sweeps", pv.sweeps},
          {"residual", pv.residual},
          {"converged", pv.converged},
          {"belief_points", pv.belief_points}};
}

PolicyValue policy_value_from_json(const nlohmann::json& j) {
  try {
    PolicyValue pv;
    for (const auto& set : j.at("alphas")) {
      std::vector<AlphaVector> vs;
      for (const auto& v : set) vs.push_back({v.at("action").get<int>(), v.at("alpha").get<std::vector<double>>()});
      if (vs.empty()) throw ParseError("policy", "task-step without alpha vectors");
      pv.alphas.push_back(std::move(vs));
    }
    pv.sweeps = j.value("sweeps", 0);
    pv.residual = j.value("residual", 0.0);
    pv.converged = j.value("converged", false);
    pv.belief_points = j.value("belief_points", std::size_t{0});
    return pv;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("policy", ex.what());
  }
}

}  // namespace hrc
